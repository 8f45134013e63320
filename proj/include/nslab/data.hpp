#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nslab/fields.hpp"
#include "nslab/grid.hpp"

namespace nslab {

struct SingularProfileParams {
  double C = 1.0;
  double alpha = 0.75;
  double delta_supp = 0.25;  // plateau radius of the cutoff
  double eps_supp = 0.5;     // outer support radius of the cutoff

  bool operator==(const SingularProfileParams&) const = default;
};

void validate(const SingularProfileParams& p, double box_half_width);

// Smooth cutoff: 1 on |z| <= delta_supp, 0 on |z| >= eps_supp.
double bump(double z, double delta_supp, double eps_supp);
double bump_derivative(double z, double delta_supp, double eps_supp);

// (C + z^3 cos(|z|^-alpha)) * bump(z); equals C at z = 0.
double singular_profile(double z, const SingularProfileParams& p);
double singular_profile_d1(double z, const SingularProfileParams& p);
// Second derivative on the plateau 0 < |z| <= delta_supp; throws at z = 0.
double singular_profile_d2(double z, const SingularProfileParams& p);

// harmonic: h_{0 mu} chosen so that Gamma^mu = 0 on the data slice, h_ij kept.
enum class InitialRateMode { zero, smooth, harmonic };

struct DataOptions {
  InitialRateMode h0_mode = InitialRateMode::zero;
  double h0_amp = 0.0;
  // Spatial indices i in 1..n whose g_ii receives the profile.
  std::vector<int> perturbed = {1};
  double min_margin = 0.5;
};

struct AdmissibilityReport {
  double s = 0.0;
  LorentzReport lorentz;
  std::vector<double> sobolev_g;
  std::vector<double> sobolev_h;
  double product_bound = 0.0;  // max over component pairs of sup |g_{mu nu} g^{lambda rho}|
  bool lorentz_ok = false;
  bool sobolev_ok = false;
  bool product_ok = false;
  bool passed = false;
};

struct DataList {
  std::string kind = "custom";
  SliceFields fields;  // g0, g0_{,k}, h0
  std::optional<SingularProfileParams> profile;
  double amp = 0.0;
  std::optional<AdmissibilityReport> admissibility;

  const GridSpec& grid() const { return fields.grid(); }
};

// Wraps metric and rate fields; spatial derivatives are spectral.
DataList data_from_metric(std::vector<ScalarGridField> g, std::vector<ScalarGridField> h, std::string kind);
DataList data_from_slice(SliceFields fields, std::string kind);

DataList build_flat_data(const GridSpec& grid);
DataList build_singular_data(const GridSpec& grid, const SingularProfileParams& p, double amp,
                             const DataOptions& options = {});

// Admissibility of data for Sobolev index s > n/2 + 1.
AdmissibilityReport check_admissible(const DataList& d, double s);
double default_sobolev_index(int n);

// Exact harmonic-gauge wave: g = diag(-H, H, 1, ...), H = 1 - A sin(2 pi (x^1 - t) / d).
struct GaugeWave {
  double amplitude = 0.1;
  double wavelength = 2.0;

  bool operator==(const GaugeWave&) const = default;
  SliceFields slice(const GridSpec& grid, double t) const;
  History history(const GridSpec& grid, const TimeGrid& time) const;
};

// Solves the linear system Gamma^mu(h_{00}, ..., h_{0n}) = 0 pointwise; Gamma^mu is affine in these slots.
void impose_harmonic_rate(SliceFields& fields, double eps_det = 1e-10);

DataList build_gauge_wave_data(const GridSpec& grid, const GaugeWave& wave);

}  // namespace nslab
