#pragma once

#include <vector>

#include "nslab/grid.hpp"
#include "nslab/tensor.hpp"

namespace nslab {

// The evolved unknowns on one time slice: g_{mu nu}, g_{mu nu,k} and h_{mu nu} = d_t g_{mu nu}.
struct SliceFields {
  std::vector<ScalarGridField> g;
  std::vector<ScalarGridField> dg;  // dg[axis * components + c] is the derivative along x^{axis+1}
  std::vector<ScalarGridField> h;

  static SliceFields zeros(const GridSpec& grid);

  const GridSpec& grid() const { return g.front().grid(); }
  int dim() const { return grid().n + 1; }
  int components() const { return sym_count(dim()); }
  ScalarGridField& dgk(int axis, int c) { return dg[static_cast<std::size_t>(axis * components() + c)]; }
  const ScalarGridField& dgk(int axis, int c) const {
    return dg[static_cast<std::size_t>(axis * components() + c)];
  }

  PointMetric metric_at(std::size_t p) const;
  // Spatial slots from dg, the time slot from h.
  MetricDerivatives derivatives_at(std::size_t p) const;
  bool all_finite() const;
};

SliceFields operator-(const SliceFields& a, const SliceFields& b);

struct History {
  GridSpec grid;
  TimeGrid time;
  std::vector<SliceFields> slices;  // time.slices() entries

  void validate() const;
};

struct MetricSlice {
  GridSpec grid;
  int dim = 3;
  std::vector<PointMetric> g;
  std::vector<PointMetric> g_inv;
  std::vector<MetricDerivatives> dg;
};

MetricSlice make_metric_slice(const SliceFields& fields, double eps_det = 1e-10);

struct LorentzReport {
  double margin = 0.0;  // 0 when any point has the wrong eigenvalue count
  double min_abs_eigenvalue = 0.0;
  bool one_negative_everywhere = true;
  std::size_t first_failure = kNoLocation;
  // Auxiliary ratio |g_00 / sum_{i,j>=1} g_ij|, i.e. the quadratic forms evaluated on the all-ones vector.
  double ratio_inf = 0.0;
  double ratio_sup = 0.0;
};

LorentzReport lorentz_report(const SliceFields& fields);
LorentzReport lorentz_report(const MetricSlice& slice);
double uniform_lorentz_margin(const MetricSlice& slice);
double uniform_lorentz_margin(const SliceFields& fields);

}  // namespace nslab
