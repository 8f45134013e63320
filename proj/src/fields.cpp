#include "nslab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nslab/error.hpp"

namespace nslab {

SliceFields SliceFields::zeros(const GridSpec& grid) {
  SliceFields s;
  const int comps = sym_count(grid.n + 1);
  s.g.assign(comps, ScalarGridField(grid));
  s.dg.assign(static_cast<std::size_t>(grid.n * comps), ScalarGridField(grid));
  s.h.assign(comps, ScalarGridField(grid));
  return s;
}

PointMetric SliceFields::metric_at(std::size_t p) const {
  PointMetric m(dim());
  for (int c = 0; c < components(); ++c) m.component(c) = g[c][p];
  return m;
}

MetricDerivatives SliceFields::derivatives_at(std::size_t p) const {
  MetricDerivatives d;
  d.dim = dim();
  const int comps = components();
  for (int c = 0; c < comps; ++c) {
    d.d[0][c] = h[c][p];
    for (int k = 0; k < grid().n; ++k) d.d[k + 1][c] = dgk(k, c)[p];
  }
  return d;
}

bool SliceFields::all_finite() const {
  auto ok = [](const std::vector<ScalarGridField>& v) {
    return std::all_of(v.begin(), v.end(), [](const ScalarGridField& f) { return f.all_finite(); });
  };
  return ok(g) && ok(dg) && ok(h);
}

SliceFields operator-(const SliceFields& a, const SliceFields& b) {
  SliceFields out = a;
  for (std::size_t i = 0; i < out.g.size(); ++i) out.g[i] -= b.g[i];
  for (std::size_t i = 0; i < out.dg.size(); ++i) out.dg[i] -= b.dg[i];
  for (std::size_t i = 0; i < out.h.size(); ++i) out.h[i] -= b.h[i];
  return out;
}

void History::validate() const {
  if (static_cast<int>(slices.size()) != time.slices())
    throw Error(ErrorKind::history, "history holds " + std::to_string(slices.size()) + " slices, time grid needs " +
                                        std::to_string(time.slices()));
  for (const auto& s : slices)
    if (s.g.empty() || !(s.grid() == grid)) throw Error(ErrorKind::history, "history slice on a different grid");
}

MetricSlice make_metric_slice(const SliceFields& fields, double eps_det) {
  MetricSlice m;
  m.grid = fields.grid();
  m.dim = fields.dim();
  const std::size_t np = m.grid.size();
  m.g.reserve(np);
  m.g_inv.reserve(np);
  m.dg.reserve(np);
  for (std::size_t p = 0; p < np; ++p) {
    m.g.push_back(fields.metric_at(p));
    m.g_inv.push_back(invert_metric(m.g.back(), eps_det, p));
    m.dg.push_back(fields.derivatives_at(p));
  }
  return m;
}

namespace {

template <class MetricAt>
LorentzReport lorentz_scan(std::size_t np, int dim, MetricAt&& metric_at) {
  LorentzReport r;
  r.min_abs_eigenvalue = std::numeric_limits<double>::infinity();
  r.ratio_inf = std::numeric_limits<double>::infinity();
  r.ratio_sup = 0.0;
  for (std::size_t p = 0; p < np; ++p) {
    const PointMetric g = metric_at(p);
    const SignatureInfo s = signature(g);
    r.min_abs_eigenvalue = std::min(r.min_abs_eigenvalue, s.margin);
    if (s.negative != 1 || s.positive != dim - 1) {
      if (r.one_negative_everywhere) r.first_failure = p;
      r.one_negative_everywhere = false;
    }
    double spatial = 0;
    for (int i = 1; i < dim; ++i)
      for (int j = 1; j < dim; ++j) spatial += g(i, j);
    const double ratio = spatial != 0.0 ? std::abs(g(0, 0) / spatial) : std::numeric_limits<double>::infinity();
    r.ratio_inf = std::min(r.ratio_inf, ratio);
    r.ratio_sup = std::max(r.ratio_sup, ratio);
  }
  r.margin = r.one_negative_everywhere ? r.min_abs_eigenvalue : 0.0;
  return r;
}

}  // namespace

LorentzReport lorentz_report(const SliceFields& fields) {
  return lorentz_scan(fields.grid().size(), fields.dim(), [&](std::size_t p) { return fields.metric_at(p); });
}

LorentzReport lorentz_report(const MetricSlice& slice) {
  return lorentz_scan(slice.g.size(), slice.dim, [&](std::size_t p) { return slice.g[p]; });
}

double uniform_lorentz_margin(const MetricSlice& slice) { return lorentz_report(slice).margin; }
double uniform_lorentz_margin(const SliceFields& fields) { return lorentz_report(fields).margin; }

}  // namespace nslab
