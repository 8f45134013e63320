#pragma once

#include <span>
#include <vector>

#include "nslab/fft.hpp"
#include "nslab/grid.hpp"

namespace nslab {

struct KernelSpec {
  double nu0 = 1e-2;
  GridSpec grid;
  double t = 0.1;

  double width() const;  // sqrt(4 nu0 t)
  bool resolved() const { return width() >= 2 * grid.spacing(); }
};

void validate(const KernelSpec& spec);

// Periodized Gaussian in wrap-around displacement layout (index 0 is zero displacement),
// normalized to unit discrete mass.
ScalarGridField sample_kernel(const KernelSpec& spec);
ScalarGridField sample_kernel_derivative(const KernelSpec& spec, int axis);

// Discrete circular convolution h^n sum_q f(x_q) K(x_p - x_q).
ScalarGridField conv_spatial(const ScalarGridField& f, const ScalarGridField& kernel);

// Exact periodic heat flow e^{nu0 t Delta} f via Fourier multipliers.
ScalarGridField heat_smooth(const ScalarGridField& f, double nu0, double t);

enum class EndpointRule {
  approximate_identity,  // trapezoid panels, last panel uses f(t) weighted by the remaining kernel mass
  exponential_product,   // exact integration of the piecewise-linear interpolant of f
};

// Mode-wise Duhamel integral out_j = int_0^{t_j} e^{nu0 (t_j - s) Delta} f(s) ds on a uniform time grid.
class DuhamelIntegrator {
 public:
  DuhamelIntegrator(const GridSpec& grid, const TimeGrid& time, double nu0, EndpointRule rule);

  // sources has one spectrum per stored slice; returns one spectrum per slice (slice 0 is zero).
  std::vector<Spectrum> integrate(const std::vector<Spectrum>& sources) const;
  // e^{-nu0 |k|^2 t_j} for each spectral index.
  const std::vector<double>& propagator(int slice) const { return propagators_[slice]; }

 private:
  TimeGrid time_;
  EndpointRule rule_;
  std::vector<double> step_;     // e^{-lambda dt}
  std::vector<double> w_prev_;   // weight of f_{j-1} in the last panel
  std::vector<double> w_last_;   // weight of f_j in the last panel
  std::vector<std::vector<double>> propagators_;
  double dt_;
};

// Space-time convolution (f * G)(t_j) of a history f(t_0..t_j).
ScalarGridField conv_spacetime(std::span<const ScalarGridField> history, const TimeGrid& time, int slice,
                               double nu0, EndpointRule rule = EndpointRule::approximate_identity);

// sup_{z>0} z^2 exp(-z^2/4) / 2 = 2/e.
double viscosity_constant();

struct UniformL1Row {
  double nu0 = 0.0;
  double l1_kernel = 0.0;      // L1((0,T) x box) of G
  double l1_derivative = 0.0;  // L1((0,T) x box) of G_{,k}, identical for every axis
  double lipschitz_sup = 0.0;  // sup |f *_sp G_{,1}| at t = T for a 1-Lipschitz f
  bool resolved = false;       // kernel width at t = T at least 2h
};

struct UniformL1Table {
  double T = 0.0;
  std::vector<UniformL1Row> rows;
  double cap = 0.0;           // 2x the derivative norm at the largest viscosity
  double max_derivative = 0.0;
  double spread = 0.0;        // max/min - 1 of the derivative norms
  bool within_ten_percent = false;
  bool below_cap = false;
  double c_vis = 0.0;
  bool lipschitz_bound_holds = false;  // every lipschitz_sup <= 4 c_vis
};

UniformL1Table verify_uniform_l1(std::span<const double> nu_list, double T, const GridSpec& grid);

}  // namespace nslab
