#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nslab/data.hpp"
#include "nslab/fields.hpp"
#include "nslab/heat_kernel.hpp"

namespace nslab {

// Factor in front of the principal part of the rate equation: g_00, or 1/g^{00}.
enum class Prefactor { g00, inv_g00 };

struct SchemeConfig {
  double T = 0.1;
  int M = 16;
  double nu0 = 1e-2;
  int max_iters = 40;
  double tol_fix = 1e-8;
  double tol_contract = 0.9;
  Prefactor prefactor = Prefactor::g00;
  EndpointRule endpoint = EndpointRule::approximate_identity;
  double eps_det = 1e-10;
  int patience = 3;  // consecutive ratios >= 1 tolerated before declaring non-contraction

  TimeGrid time() const { return make_time_grid(T, M); }
  bool operator==(const SchemeConfig&) const = default;
};

void validate(const SchemeConfig& cfg);

struct FamilyNorms {
  double sup = 0.0;
  double lipschitz = 0.0;  // max first difference over spacing
  double h2 = 0.0;         // max over slices of the discrete H^2 norm
  double combined() const;
};

struct IncrementNorms {
  FamilyNorms g;
  FamilyNorms dg;
  FamilyNorms h;

  double sup() const;
  double combined() const;
};

IncrementNorms increment_norms(const History& current, const History& previous);

struct IterationState {
  int l = 0;
  History current;
  std::optional<History> previous;
  std::vector<IncrementNorms> increment_norms;
  std::shared_ptr<const DataList> data;
};

IterationState init_iteration(std::shared_ptr<const DataList> data, const SchemeConfig& cfg);
IterationState init_iteration(const DataList& data, const SchemeConfig& cfg);
IterationState picard_step(const IterationState& state, const SchemeConfig& cfg);

struct ContractionRecord {
  double T = 0.0;
  double nu0 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<IncrementNorms> norms;
  std::vector<double> ratios;  // c_l = |delta_l| / |delta_{l-1}|, l >= 2
  std::vector<double> T_attempts;

  // Longest run of consecutive ratios at or below tol.
  int longest_streak(double tol) const;
  // Converged, with at least 3 consecutive ratios <= tol (or every ratio <= tol when fewer exist).
  bool contracting(double tol) const;
};

struct FixedPointOptions {
  std::optional<IterationState> resume;
  std::function<void(const IterationState&)> on_iteration;
};

struct FixedPointResult {
  IterationState state;
  ContractionRecord record;

  const History& fields() const { return state.current; }
};

FixedPointResult run_fixed_point(const DataList& data, const SchemeConfig& cfg, const FixedPointOptions& options = {});

// Halves T (at fixed M) until the run converges while contracting with factor tol_contract.
FixedPointResult run_fixed_point_auto_T(const DataList& data, SchemeConfig cfg, int max_halvings = 6);

struct ResolutionPolicy {
  bool enforce = true;
};

// nu0 >= h^2 and sqrt(4 nu0 T) >= h.
bool viscosity_resolved(double nu0, const GridSpec& grid, double T);

struct SweepReport {
  std::vector<double> nus;
  std::vector<ContractionRecord> records;
  std::vector<History> solutions;
  std::vector<double> distances;  // sup distance between successive viscosity solutions
  std::optional<History> extrapolated;
  ExclusionRegion exclusion;
};

SweepReport viscosity_sweep(const DataList& data, const SchemeConfig& base, std::span<const double> nus,
                            const ExclusionRegion& exclusion = {}, ResolutionPolicy policy = {});

// Sup over slices and families of the difference, restricted to points outside the exclusion region.
double history_distance(const History& a, const History& b, const ExclusionRegion& exclusion = {});

// d_t h of the inviscid harmonic system on one slice, from spectral derivatives of h and g_{,k}.
std::vector<ScalarGridField> harmonic_rate(const SliceFields& fields, Prefactor prefactor, double eps_det = 1e-10);

struct ResidualOptions {
  Prefactor prefactor = Prefactor::g00;
  ExclusionRegion exclusion;
  int time_order = 4;  // 2 or 4
  double eps_det = 1e-10;
};

struct ResidualReport {
  std::array<double, 3> sup{0.0, 0.0, 0.0};  // d_t g - h, d_t g_{,k} - d_k h, d_t h - rate
  std::vector<std::array<double, 3>> per_slice;
  std::vector<int> slices;  // slice index of each per_slice entry
  int time_order = 4;

  double max() const { return std::max({sup[0], sup[1], sup[2]}); }
};

ResidualReport harmonic_residual(const History& fields, const ResidualOptions& options = {});

}  // namespace nslab
