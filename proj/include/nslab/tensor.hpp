#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <utility>

namespace nslab {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxSym = 10;
inline constexpr std::size_t kNoLocation = std::numeric_limits<std::size_t>::max();

constexpr int sym_count(int dim) { return dim * (dim + 1) / 2; }

// Upper-triangle row-major index of (mu, nu), symmetric in its arguments.
constexpr int sym_index(int mu, int nu, int dim) {
  if (mu > nu) std::swap(mu, nu);
  return mu * dim - mu * (mu - 1) / 2 + (nu - mu);
}

std::pair<int, int> sym_pair(int component, int dim);

// Symmetric (n+1)x(n+1) matrix, index 0 is time.
class PointMetric {
 public:
  PointMetric() = default;
  explicit PointMetric(int dim) : dim_(dim) {}
  static PointMetric minkowski(int dim);
  static PointMetric diagonal(std::initializer_list<double> entries);

  int dim() const { return dim_; }
  double operator()(int mu, int nu) const { return c_[sym_index(mu, nu, dim_)]; }
  void set(int mu, int nu, double v) { c_[sym_index(mu, nu, dim_)] = v; }
  double component(int c) const { return c_[c]; }
  double& component(int c) { return c_[c]; }

 private:
  int dim_ = 3;
  std::array<double, kMaxSym> c_{};
};

double determinant(const PointMetric& g);

// Inverse by partially pivoted elimination; throws DegenerateMetricError when |det| <= eps_det.
PointMetric invert_metric(const PointMetric& g, double eps_det = 1e-10, std::size_t location = kNoLocation);

// d[rho][sym(mu,nu)] = d g_{mu nu} / d x^rho, rho = 0 is the time derivative.
struct MetricDerivatives {
  int dim = 3;
  std::array<std::array<double, kMaxSym>, kMaxDim> d{};

  double operator()(int rho, int mu, int nu) const { return d[rho][sym_index(mu, nu, dim)]; }
  void set(int rho, int mu, int nu, double v) { d[rho][sym_index(mu, nu, dim)] = v; }
};

using Rank3 = std::array<std::array<std::array<double, kMaxDim>, kMaxDim>, kMaxDim>;

struct ChristoffelPoint {
  int dim = 3;
  Rank3 gamma{};                          // gamma[mu][alpha][beta]
  std::array<double, kMaxDim> contracted{};  // g^{ab} Gamma^mu_{ab}
};

ChristoffelPoint christoffel(const PointMetric& g_inv, const MetricDerivatives& dg);

// d[rho][mu][alpha][beta] = d Gamma^mu_{alpha beta} / d x^rho.
struct ChristoffelDerivatives {
  int dim = 3;
  std::array<Rank3, kMaxDim> d{};
};

// d[rho][sigma][sym(mu,nu)] = second derivative of g_{mu nu} along x^rho, x^sigma.
struct MetricSecondDerivatives {
  int dim = 3;
  std::array<std::array<std::array<double, kMaxSym>, kMaxDim>, kMaxDim> d{};

  double operator()(int rho, int sigma, int mu, int nu) const { return d[rho][sigma][sym_index(mu, nu, dim)]; }
};

// Chain rule: d Gamma^mu_{ab} = -g^{mu s} (d g_{s b'}) Gamma^{b'}_{ab} + g^{mu s} d Gamma_{s a b}.
ChristoffelDerivatives christoffel_derivatives(const PointMetric& g_inv, const ChristoffelPoint& gamma,
                                               const MetricDerivatives& dg, const MetricSecondDerivatives& ddg);

struct CurvaturePoint {
  PointMetric ricci;
  double scalar = 0.0;
};

CurvaturePoint ricci_point(const PointMetric& g_inv, const ChristoffelPoint& gamma,
                           const ChristoffelDerivatives& dgamma);

PointMetric harmonic_source(const PointMetric& g, const PointMetric& g_inv, const MetricDerivatives& dg);
PointMetric harmonic_source(const PointMetric& g, const PointMetric& g_inv, const MetricDerivatives& dg,
                            const ChristoffelPoint& gamma);

struct SignatureInfo {
  int negative = 0;
  int positive = 0;
  double margin = 0.0;  // min |eigenvalue|
  bool degenerate = false;
};

SignatureInfo signature(const PointMetric& g, double zero_tol = 1e-12);

// Number of unknowns g, g_{,k}, h for n space dimensions: (n+1)(n+2)^2/2.
long unknown_count(int n);

}  // namespace nslab
