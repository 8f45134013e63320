#include "nslab/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"

namespace nslab {

void validate(const SingularProfileParams& p, double box_half_width) {
  if (!(p.C > 0)) throw Error(ErrorKind::validation, "data.C must be positive");
  if (!(p.alpha > 0.5 && p.alpha < 1.0)) throw Error(ErrorKind::validation, "data.alpha must lie in (0.5, 1)");
  if (!(p.delta_supp > 0 && p.delta_supp < p.eps_supp))
    throw Error(ErrorKind::validation, "data.delta_supp must satisfy 0 < delta_supp < eps_supp");
  if (!(p.eps_supp < box_half_width)) throw Error(ErrorKind::validation, "data.eps_supp must be smaller than grid.L");
}

namespace {

double transition(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }
double transition_d(double u) { return u > 0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

}  // namespace

double bump(double z, double delta_supp, double eps_supp) {
  const double a = std::abs(z);
  if (a <= delta_supp) return 1.0;
  if (a >= eps_supp) return 0.0;
  const double s = (a - delta_supp) / (eps_supp - delta_supp);
  const double in = transition(1.0 - s);
  const double out = transition(s);
  return in / (in + out);
}

double bump_derivative(double z, double delta_supp, double eps_supp) {
  const double a = std::abs(z);
  if (a <= delta_supp || a >= eps_supp) return 0.0;
  const double s = (a - delta_supp) / (eps_supp - delta_supp);
  const double in = transition(1.0 - s);
  const double out = transition(s);
  const double din = -transition_d(1.0 - s);
  const double dout = transition_d(s);
  const double ds = (din * out - in * dout) / ((in + out) * (in + out));
  return (z > 0 ? 1.0 : -1.0) * ds / (eps_supp - delta_supp);
}

namespace {

// q(z) = z^3 cos(|z|^-alpha) and its first two derivatives.
double oscillation(double z, double alpha) {
  if (z == 0.0) return 0.0;
  const double u = std::abs(z);
  return z * z * z * std::cos(std::pow(u, -alpha));
}

double oscillation_d1(double z, double alpha) {
  if (z == 0.0) return 0.0;
  const double u = std::abs(z);
  const double phase = std::pow(u, -alpha);
  return 3 * u * u * std::cos(phase) + alpha * std::pow(u, 2 - alpha) * std::sin(phase);
}

double oscillation_d2(double z, double alpha) {
  const double u = std::abs(z);
  const double phase = std::pow(u, -alpha);
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  const double magnitude = 6 * u * c + (3 * alpha + alpha * (2 - alpha)) * std::pow(u, 1 - alpha) * s -
                           alpha * alpha * std::pow(u, 1 - 2 * alpha) * c;
  return z > 0 ? magnitude : -magnitude;
}

}  // namespace

double singular_profile(double z, const SingularProfileParams& p) {
  if (z == 0.0) return p.C;
  return (p.C + oscillation(z, p.alpha)) * bump(z, p.delta_supp, p.eps_supp);
}

double singular_profile_d1(double z, const SingularProfileParams& p) {
  return oscillation_d1(z, p.alpha) * bump(z, p.delta_supp, p.eps_supp) +
         (p.C + oscillation(z, p.alpha)) * bump_derivative(z, p.delta_supp, p.eps_supp);
}

double singular_profile_d2(double z, const SingularProfileParams& p) {
  if (z == 0.0) throw Error(ErrorKind::undefined_point, "second derivative of the profile is undefined at z = 0");
  if (std::abs(z) > p.delta_supp)
    throw Error(ErrorKind::domain, "closed-form second derivative is only available on the plateau");
  return oscillation_d2(z, p.alpha);
}

DataList data_from_slice(SliceFields fields, std::string kind) {
  DataList d;
  d.kind = std::move(kind);
  d.fields = std::move(fields);
  return d;
}

DataList data_from_metric(std::vector<ScalarGridField> g, std::vector<ScalarGridField> h, std::string kind) {
  if (g.empty() || g.size() != h.size()) throw Error(ErrorKind::shape, "metric and rate need matching components");
  const GridSpec grid = g.front().grid();
  if (static_cast<int>(g.size()) != sym_count(grid.n + 1))
    throw Error(ErrorKind::shape, "wrong number of metric components for the grid dimension");
  SliceFields s;
  s.g = std::move(g);
  s.h = std::move(h);
  for (int k = 0; k < grid.n; ++k)
    for (const auto& c : s.g) s.dg.push_back(spatial_derivative(c, k));
  return data_from_slice(std::move(s), std::move(kind));
}

DataList build_flat_data(const GridSpec& grid) {
  SliceFields s = SliceFields::zeros(grid);
  const int D = grid.n + 1;
  for (int mu = 0; mu < D; ++mu) s.g[sym_index(mu, mu, D)] = ScalarGridField(grid, mu == 0 ? -1.0 : 1.0);
  DataList d = data_from_slice(std::move(s), "flat");
  d.admissibility = check_admissible(d, default_sobolev_index(grid.n));
  return d;
}

DataList build_singular_data(const GridSpec& grid, const SingularProfileParams& p, double amp,
                             const DataOptions& options) {
  validate(p, grid.L);
  const int D = grid.n + 1;
  std::vector<ScalarGridField> g;
  std::vector<ScalarGridField> h;
  for (int c = 0; c < sym_count(D); ++c) {
    const auto [mu, nu] = sym_pair(c, D);
    const double base = mu != nu ? 0.0 : (mu == 0 ? -1.0 : 1.0);
    g.emplace_back(grid, base);
    h.emplace_back(grid, 0.0);
  }
  for (int i : options.perturbed) {
    if (i < 1 || i > grid.n) throw Error(ErrorKind::validation, "perturbed component index out of range");
    auto& gi = g[sym_index(i, i, D)];
    for (std::size_t q = 0; q < grid.size(); ++q) {
      const double z = grid.point(q)[0];
      gi[q] += amp * bump(z, p.delta_supp, p.eps_supp) * singular_profile(z, p);
    }
    if (options.h0_mode == InitialRateMode::smooth) {
      auto& hi = h[sym_index(i, i, D)];
      for (std::size_t q = 0; q < grid.size(); ++q) {
        const auto x = grid.point(q);
        double r2 = 0;
        for (int a = 0; a < grid.n; ++a) r2 += x[a] * x[a];
        hi[q] = options.h0_amp * bump(std::sqrt(r2), p.delta_supp, p.eps_supp);
      }
    }
  }
  DataList d = data_from_metric(std::move(g), std::move(h), "singular");
  if (options.h0_mode == InitialRateMode::harmonic) impose_harmonic_rate(d.fields);
  d.profile = p;
  d.amp = amp;
  d.admissibility = check_admissible(d, default_sobolev_index(grid.n));
  const auto& lr = d.admissibility->lorentz;
  if (!lr.one_negative_everywhere || lr.margin < options.min_margin)
    throw RejectedDataError(lr.margin, "uniform Lorentz margin below " + std::to_string(options.min_margin));
  return d;
}

void impose_harmonic_rate(SliceFields& fields, double eps_det) {
  const int D = fields.dim();
  for (std::size_t p = 0; p < fields.grid().size(); ++p) {
    const PointMetric gi = invert_metric(fields.metric_at(p), eps_det, p);
    MetricDerivatives dg = fields.derivatives_at(p);
    for (int nu = 0; nu < D; ++nu) dg.d[0][sym_index(0, nu, D)] = 0.0;
    const auto base = christoffel(gi, dg).contracted;
    Eigen::Matrix4d A = Eigen::Matrix4d::Identity();
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    for (int nu = 0; nu < D; ++nu) {
      MetricDerivatives unit = dg;
      unit.d[0][sym_index(0, nu, D)] = 1.0;
      const auto col = christoffel(gi, unit).contracted;
      for (int mu = 0; mu < D; ++mu) A(mu, nu) = col[mu] - base[mu];
    }
    for (int mu = 0; mu < D; ++mu) b(mu) = -base[mu];
    const auto lu = A.topLeftCorner(D, D).fullPivLu();
    if (!lu.isInvertible()) throw Error(ErrorKind::degenerate_metric, "harmonic rate system is singular at point " + std::to_string(p));
    const Eigen::VectorXd x = lu.solve(b.head(D));
    for (int nu = 0; nu < D; ++nu) fields.h[sym_index(0, nu, D)][p] = x(nu);
  }
}

double default_sobolev_index(int n) { return n / 2.0 + 1.1; }

AdmissibilityReport check_admissible(const DataList& d, double s) {
  const auto& f = d.fields;
  const int n = f.grid().n;
  if (!(s > n / 2.0 + 1.0)) throw Error(ErrorKind::configuration, "Sobolev index must exceed n/2 + 1");
  AdmissibilityReport r;
  r.s = s;
  r.lorentz = lorentz_report(f);
  r.lorentz_ok = r.lorentz.one_negative_everywhere && r.lorentz.margin > 0;
  for (const auto& c : f.g) r.sobolev_g.push_back(sobolev_norm(c, s));
  for (const auto& c : f.h) r.sobolev_h.push_back(sobolev_norm(c, s));
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  r.sobolev_ok = finite(r.sobolev_g) && finite(r.sobolev_h);
  if (r.lorentz_ok) {
    const int comps = f.components();
    for (std::size_t p = 0; p < f.grid().size(); ++p) {
      const PointMetric g = f.metric_at(p);
      const PointMetric gi = invert_metric(g, 1e-10, p);
      double gmax = 0;
      double imax = 0;
      for (int c = 0; c < comps; ++c) {
        gmax = std::max(gmax, std::abs(g.component(c)));
        imax = std::max(imax, std::abs(gi.component(c)));
      }
      r.product_bound = std::max(r.product_bound, gmax * imax);
    }
    r.product_ok = std::isfinite(r.product_bound);
  }
  r.passed = r.lorentz_ok && r.sobolev_ok && r.product_ok;
  return r;
}

SliceFields GaugeWave::slice(const GridSpec& grid, double t) const {
  SliceFields s = SliceFields::zeros(grid);
  const int D = grid.n + 1;
  const double k = 2 * std::numbers::pi / wavelength;
  const int c00 = sym_index(0, 0, D);
  const int c11 = sym_index(1, 1, D);
  for (int i = 2; i < D; ++i) s.g[sym_index(i, i, D)] = ScalarGridField(grid, 1.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double phase = k * (grid.point(p)[0] - t);
    const double H = 1 - amplitude * std::sin(phase);
    const double dH_dx = -amplitude * k * std::cos(phase);
    const double dH_dt = amplitude * k * std::cos(phase);
    s.g[c00][p] = -H;
    s.g[c11][p] = H;
    s.h[c00][p] = -dH_dt;
    s.h[c11][p] = dH_dt;
    s.dgk(0, c00)[p] = -dH_dx;
    s.dgk(0, c11)[p] = dH_dx;
  }
  return s;
}

History GaugeWave::history(const GridSpec& grid, const TimeGrid& time) const {
  History hist{grid, time, {}};
  for (int j = 0; j < time.slices(); ++j) hist.slices.push_back(slice(grid, time.time(j)));
  return hist;
}

DataList build_gauge_wave_data(const GridSpec& grid, const GaugeWave& wave) {
  DataList d = data_from_slice(wave.slice(grid, 0.0), "gauge-wave");
  d.admissibility = check_admissible(d, default_sobolev_index(grid.n));
  return d;
}

}  // namespace nslab
