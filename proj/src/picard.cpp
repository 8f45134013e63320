#include "nslab/picard.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"

namespace nslab {

void validate(const SchemeConfig& cfg) {
  if (!(cfg.T > 0)) throw Error(ErrorKind::validation, "scheme.T must be positive");
  if (cfg.M < 2) throw Error(ErrorKind::validation, "scheme.M must be at least 2");
  if (!(cfg.nu0 > 0)) throw Error(ErrorKind::validation, "scheme.nu0 must be positive");
  if (cfg.max_iters < 2) throw Error(ErrorKind::validation, "scheme.max_iters must be at least 2");
  if (!(cfg.tol_fix > 0)) throw Error(ErrorKind::validation, "scheme.tol_fix must be positive");
  if (!(cfg.tol_contract > 0 && cfg.tol_contract < 1))
    throw Error(ErrorKind::validation, "scheme.tol_contract must lie in (0, 1)");
  if (cfg.patience < 1) throw Error(ErrorKind::validation, "scheme.patience must be at least 1");
}

double FamilyNorms::combined() const { return std::max({sup, lipschitz, h2}); }
double IncrementNorms::sup() const { return std::max({g.sup, dg.sup, h.sup}); }
double IncrementNorms::combined() const { return std::max({g.combined(), dg.combined(), h.combined()}); }

namespace {

void accumulate(FamilyNorms& norms, const ScalarGridField& delta) {
  const auto& grid = delta.grid();
  norms.sup = std::max(norms.sup, delta.sup_norm());
  const double inv_h = 1.0 / grid.spacing();
  for (int a = 0; a < grid.n; ++a)
    for (std::size_t p = 0; p < grid.size(); ++p)
      norms.lipschitz = std::max(norms.lipschitz, std::abs(delta[grid.neighbour(p, a, 1)] - delta[p]) * inv_h);
  norms.h2 = std::max(norms.h2, sobolev_norm(delta, 2.0));
}

}  // namespace

IncrementNorms increment_norms(const History& current, const History& previous) {
  if (current.slices.size() != previous.slices.size())
    throw Error(ErrorKind::history, "increment between histories of different length");
  IncrementNorms out;
  for (std::size_t j = 0; j < current.slices.size(); ++j) {
    const SliceFields delta = current.slices[j] - previous.slices[j];
    for (const auto& f : delta.g) accumulate(out.g, f);
    for (const auto& f : delta.dg) accumulate(out.dg, f);
    for (const auto& f : delta.h) accumulate(out.h, f);
  }
  return out;
}

IterationState init_iteration(std::shared_ptr<const DataList> data, const SchemeConfig& cfg) {
  validate(cfg);
  if (!data) throw Error(ErrorKind::gate, "no data supplied");
  if (!data->admissibility || !data->admissibility->passed)
    throw Error(ErrorKind::gate, "data must carry a passing admissibility report before evolution");
  const GridSpec grid = data->grid();
  const TimeGrid time = cfg.time();
  const auto& d = data->fields;
  auto& ft = transform_for(grid);
  auto spectra = [&](const std::vector<ScalarGridField>& v) {
    std::vector<Spectrum> s;
    for (const auto& f : v) s.push_back(ft.forward(f.values()));
    return s;
  };
  const auto sg = spectra(d.g);
  const auto sdg = spectra(d.dg);
  const auto sh = spectra(d.h);

  IterationState state;
  state.data = data;
  state.current = History{grid, time, {}};
  state.current.slices.reserve(time.slices());
  state.current.slices.push_back(d);
  Spectrum work;
  auto propagate = [&](const Spectrum& s, double t, ScalarGridField& out) {
    work = s;
    for (std::size_t i = 0; i < work.size(); ++i) work[i] *= std::exp(-cfg.nu0 * ft.k_squared(i) * t);
    ft.inverse(work, out.values());
  };
  for (int j = 1; j < time.slices(); ++j) {
    SliceFields s = SliceFields::zeros(grid);
    const double t = time.time(j);
    for (std::size_t c = 0; c < sg.size(); ++c) propagate(sg[c], t, s.g[c]);
    for (std::size_t c = 0; c < sdg.size(); ++c) propagate(sdg[c], t, s.dg[c]);
    for (std::size_t c = 0; c < sh.size(); ++c) propagate(sh[c], t, s.h[c]);
    state.current.slices.push_back(std::move(s));
  }
  return state;
}

IterationState init_iteration(const DataList& data, const SchemeConfig& cfg) {
  return init_iteration(std::make_shared<const DataList>(data), cfg);
}

namespace {

// Lorentzian with spacelike slices: det < 0 and positive definite spatial block.
bool lorentz_fast(const PointMetric& g, double det) {
  if (!(det < 0)) return false;
  const int n = g.dim() - 1;
  if (!(g(1, 1) > 0)) return false;
  if (n >= 2 && !(g(1, 1) * g(2, 2) - g(1, 2) * g(1, 2) > 0)) return false;
  if (n == 3) {
    const double m = g(1, 1) * (g(2, 2) * g(3, 3) - g(2, 3) * g(2, 3)) -
                     g(1, 2) * (g(1, 2) * g(3, 3) - g(2, 3) * g(1, 3)) +
                     g(1, 3) * (g(1, 2) * g(2, 3) - g(2, 2) * g(1, 3));
    if (!(m > 0)) return false;
  }
  return true;
}

PointMetric checked_inverse(const PointMetric& g, double eps_det, int slice, std::size_t p) {
  const double det = determinant(g);
  if (!(std::abs(det) > eps_det)) throw SignatureLossError(slice, p, "degenerate metric, det " + std::to_string(det));
  if (!lorentz_fast(g, det)) {
    const SignatureInfo s = signature(g);
    if (s.negative != 1 || s.positive != g.dim() - 1)
      throw SignatureLossError(slice, p,
                               "eigenvalue signs (" + std::to_string(s.negative) + " negative, " +
                                   std::to_string(s.positive) + " positive)");
  }
  return invert_metric(g, eps_det, p);
}

struct PrincipalCoefficients {
  double P = 0;
  std::array<double, kMaxDim> A{};                         // A^m = 2 P g^{0m}
  std::array<std::array<double, kMaxDim>, kMaxDim> B{};    // B^{km} = P g^{km}
  double divA = 0;                                         // d_m A^m
  std::array<double, kMaxDim> divB{};                      // d_m B^{km}
};

// Coefficients of the rate equation; spatial derivatives of the inverse metric come from the carried g_{,k}.
PrincipalCoefficients coefficients(const PointMetric& g_inv, const MetricDerivatives& dg, Prefactor prefactor,
                                   const PointMetric& g) {
  const int D = g.dim();
  PrincipalCoefficients c;
  // dinv[m][a][b] = d_m g^{ab}
  std::array<std::array<std::array<double, kMaxDim>, kMaxDim>, kMaxDim> dinv{};
  for (int m = 1; m < D; ++m) {
    std::array<std::array<double, kMaxDim>, kMaxDim> tmp{};
    for (int a = 0; a < D; ++a)
      for (int nu = 0; nu < D; ++nu) {
        double s = 0;
        for (int mu = 0; mu < D; ++mu) s += g_inv(a, mu) * dg(m, mu, nu);
        tmp[a][nu] = s;
      }
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) {
        double s = 0;
        for (int nu = 0; nu < D; ++nu) s += tmp[a][nu] * g_inv(nu, b);
        dinv[m][a][b] = -s;
      }
  }
  std::array<double, kMaxDim> dP{};
  if (prefactor == Prefactor::g00) {
    c.P = g(0, 0);
    for (int m = 1; m < D; ++m) dP[m] = dg(m, 0, 0);
  } else {
    c.P = 1.0 / g_inv(0, 0);
    for (int m = 1; m < D; ++m) dP[m] = -c.P * c.P * dinv[m][0][0];
  }
  for (int m = 1; m < D; ++m) {
    c.A[m] = 2 * c.P * g_inv(0, m);
    c.divA += 2 * (dP[m] * g_inv(0, m) + c.P * dinv[m][0][m]);
    for (int k = 1; k < D; ++k) {
      c.B[k][m] = c.P * g_inv(k, m);
      c.divB[k] += dP[m] * g_inv(k, m) + c.P * dinv[m][k][m];
    }
  }
  return c;
}

std::complex<double> derivative_symbol(const FourierTransform& ft, std::size_t i, int axis) {
  if (ft.nyquist(i, axis)) return {0.0, 0.0};
  return {0.0, ft.wavevector(i)[axis]};
}

void require_finite(const SliceFields& s, int slice) {
  if (!s.all_finite())
    throw Error(ErrorKind::divergence, "non-finite values in iterate at slice " + std::to_string(slice));
}

}  // namespace

IterationState picard_step(const IterationState& state, const SchemeConfig& cfg) {
  validate(cfg);
  if (!state.data) throw Error(ErrorKind::gate, "iteration state carries no data");
  const History& prev = state.current;
  prev.validate();
  const GridSpec grid = prev.grid;
  const TimeGrid time = prev.time;
  const int n = grid.n;
  const int D = n + 1;
  const int comps = sym_count(D);
  const std::size_t np = grid.size();
  const int slices = time.slices();
  auto& ft = transform_for(grid);
  const std::size_t modes = ft.spectrum_size();

  // rate[c][j]: spectrum of h_c at slice j; source[c][j]: spectrum of the rate-equation source.
  std::vector<std::vector<Spectrum>> rate(comps, std::vector<Spectrum>(slices));
  std::vector<std::vector<Spectrum>> source(comps, std::vector<Spectrum>(slices));

  std::vector<std::vector<double>> flux(static_cast<std::size_t>(n * comps), std::vector<double>(np));
  std::vector<std::vector<double>> lower(comps, std::vector<double>(np));
  Spectrum work;
  for (int j = 0; j < slices; ++j) {
    const SliceFields& s = prev.slices[j];
    require_finite(s, j);
    for (std::size_t p = 0; p < np; ++p) {
      const PointMetric g = s.metric_at(p);
      const PointMetric gi = checked_inverse(g, cfg.eps_det, j, p);
      const MetricDerivatives dg = s.derivatives_at(p);
      const ChristoffelPoint gamma = christoffel(gi, dg);
      const PointMetric H = harmonic_source(g, gi, dg, gamma);
      const PrincipalCoefficients co = coefficients(gi, dg, cfg.prefactor, g);
      for (int c = 0; c < comps; ++c) {
        const double hc = s.h[c][p];
        double lam = co.divA * hc + 2 * co.P * H.component(c);
        for (int k = 1; k < D; ++k) lam += co.divB[k] * s.dgk(k - 1, c)[p];
        lower[c][p] = lam;
        for (int m = 1; m < D; ++m) {
          double phi = co.A[m] * hc;
          for (int k = 1; k < D; ++k) phi += co.B[k][m] * s.dgk(k - 1, c)[p];
          flux[static_cast<std::size_t>((m - 1) * comps + c)][p] = phi;
        }
      }
    }
    for (int c = 0; c < comps; ++c) {
      ft.forward(s.h[c].values(), rate[c][j]);
      Spectrum& src = source[c][j];
      ft.forward(lower[c], src);
      for (int m = 0; m < n; ++m) {
        ft.forward(flux[static_cast<std::size_t>(m * comps + c)], work);
        for (std::size_t i = 0; i < modes; ++i) src[i] -= derivative_symbol(ft, i, m) * work[i];
      }
    }
  }

  const DuhamelIntegrator duhamel(grid, time, cfg.nu0, cfg.endpoint);
  const SliceFields& data = state.data->fields;
  History next{grid, time, std::vector<SliceFields>(slices)};
  next.slices[0] = data;
  for (int j = 1; j < slices; ++j) next.slices[j] = SliceFields::zeros(grid);

  for (int c = 0; c < comps; ++c) {
    const auto g_int = duhamel.integrate(rate[c]);
    const auto h_int = duhamel.integrate(source[c]);
    const Spectrum g0 = ft.forward(data.g[c].values());
    const Spectrum h0 = ft.forward(data.h[c].values());
    std::vector<Spectrum> dg0;
    for (int k = 0; k < n; ++k) dg0.push_back(ft.forward(data.dgk(k, c).values()));
    for (int j = 1; j < slices; ++j) {
      const auto& prop = duhamel.propagator(j);
      SliceFields& out = next.slices[j];
      work.resize(modes);
      for (std::size_t i = 0; i < modes; ++i) work[i] = prop[i] * g0[i] + g_int[j][i];
      ft.inverse(work, out.g[c].values());
      for (std::size_t i = 0; i < modes; ++i) work[i] = prop[i] * h0[i] + h_int[j][i];
      ft.inverse(work, out.h[c].values());
      for (int k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < modes; ++i)
          work[i] = prop[i] * dg0[k][i] + derivative_symbol(ft, i, k) * g_int[j][i];
        ft.inverse(work, out.dgk(k, c).values());
      }
    }
  }
  for (int j = 1; j < slices; ++j) require_finite(next.slices[j], j);

  IterationState out;
  out.l = state.l + 1;
  out.data = state.data;
  out.increment_norms = state.increment_norms;
  out.increment_norms.push_back(increment_norms(next, prev));
  out.previous = prev;
  out.current = std::move(next);
  return out;
}

int ContractionRecord::longest_streak(double tol) const {
  int best = 0;
  int run = 0;
  for (double r : ratios) {
    run = r <= tol ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

bool ContractionRecord::contracting(double tol) const {
  if (!converged) return false;
  if (ratios.size() < 3) {
    for (double r : ratios)
      if (r > tol) return false;
    return true;
  }
  return longest_streak(tol) >= 3 && ratios.back() <= tol;
}

FixedPointResult run_fixed_point(const DataList& data, const SchemeConfig& cfg, const FixedPointOptions& options) {
  validate(cfg);
  FixedPointResult result;
  result.state = options.resume ? *options.resume : init_iteration(data, cfg);
  auto& rec = result.record;
  rec.T = cfg.T;
  rec.nu0 = cfg.nu0;
  rec.T_attempts.push_back(cfg.T);
  auto ratio_of = [](const IncrementNorms& now, const IncrementNorms& before) {
    const double b = before.combined();
    return b > 0 ? now.combined() / b : 0.0;
  };
  rec.norms = result.state.increment_norms;
  for (std::size_t l = 1; l < rec.norms.size(); ++l) rec.ratios.push_back(ratio_of(rec.norms[l], rec.norms[l - 1]));
  if (!rec.norms.empty() && rec.norms.back().sup() < cfg.tol_fix) {
    rec.converged = true;
    rec.iterations = result.state.l;
    return result;
  }

  int streak = 0;
  while (result.state.l < cfg.max_iters) {
    result.state = picard_step(result.state, cfg);
    rec.norms = result.state.increment_norms;
    rec.iterations = result.state.l;
    if (rec.norms.size() >= 2) {
      const double r = ratio_of(rec.norms.back(), rec.norms[rec.norms.size() - 2]);
      rec.ratios.push_back(r);
      streak = r >= 1.0 ? streak + 1 : 0;
    }
    if (options.on_iteration) options.on_iteration(result.state);
    if (rec.norms.back().sup() < cfg.tol_fix) {
      rec.converged = true;
      break;
    }
    if (streak >= cfg.patience)
      throw ContractionFailure(rec.ratios, "contraction ratio >= 1 for " + std::to_string(streak) +
                                               " consecutive iterations at T = " + std::to_string(cfg.T));
  }
  return result;
}

FixedPointResult run_fixed_point_auto_T(const DataList& data, SchemeConfig cfg, int max_halvings) {
  std::vector<double> attempts;
  std::vector<double> last_ratios;
  for (int attempt = 0; attempt <= max_halvings; ++attempt) {
    attempts.push_back(cfg.T);
    try {
      FixedPointResult r = run_fixed_point(data, cfg);
      if (r.record.contracting(cfg.tol_contract)) {
        r.record.T_attempts = attempts;
        return r;
      }
      last_ratios = r.record.ratios;
    } catch (const ContractionFailure& e) {
      last_ratios = e.ratios();
    }
    cfg.T *= 0.5;
  }
  throw ContractionFailure(last_ratios, "no contracting horizon found after " + std::to_string(max_halvings) +
                                            " halvings");
}

bool viscosity_resolved(double nu0, const GridSpec& grid, double T) {
  const double h = grid.spacing();
  return nu0 >= h * h && std::sqrt(4 * nu0 * T) >= h;
}

double history_distance(const History& a, const History& b, const ExclusionRegion& exclusion) {
  if (a.slices.size() != b.slices.size()) throw Error(ErrorKind::history, "distance between unequal histories");
  const auto keep = exclusion.keep(a.grid);
  double d = 0;
  for (std::size_t j = 0; j < a.slices.size(); ++j) {
    const SliceFields diff = a.slices[j] - b.slices[j];
    for (const auto* family : {&diff.g, &diff.dg, &diff.h})
      for (const auto& f : *family) d = std::max(d, f.sup_norm(keep));
  }
  return d;
}

SweepReport viscosity_sweep(const DataList& data, const SchemeConfig& base, std::span<const double> nus,
                            const ExclusionRegion& exclusion, ResolutionPolicy policy) {
  if (nus.empty()) throw Error(ErrorKind::configuration, "empty viscosity sequence");
  for (std::size_t i = 1; i < nus.size(); ++i)
    if (!(nus[i] < nus[i - 1])) throw Error(ErrorKind::configuration, "viscosity sequence must be decreasing");
  if (policy.enforce && !viscosity_resolved(nus.back(), data.grid(), base.T))
    throw Error(ErrorKind::validation, "smallest viscosity " + std::to_string(nus.back()) +
                                           " is under-resolved on this grid (needs nu0 >= h^2 and sqrt(4 nu0 T) >= h)");
  SweepReport report;
  report.exclusion = exclusion;
  for (double nu : nus) {
    SchemeConfig cfg = base;
    cfg.nu0 = nu;
    try {
      FixedPointResult r = run_fixed_point(data, cfg);
      report.nus.push_back(nu);
      report.records.push_back(r.record);
      report.solutions.push_back(std::move(r.state.current));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string("at nu0 = ") + std::to_string(nu) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < report.solutions.size(); ++i)
    report.distances.push_back(history_distance(report.solutions[i - 1], report.solutions[i], exclusion));
  if (report.solutions.size() >= 2) {
    // Linear extrapolation in nu0 through the two finest solutions.
    const std::size_t last = report.solutions.size() - 1;
    const double n1 = report.nus[last - 1];
    const double n2 = report.nus[last];
    const double w2 = n1 / (n1 - n2);
    const double w1 = -n2 / (n1 - n2);
    History ex = report.solutions[last];
    for (std::size_t j = 0; j < ex.slices.size(); ++j) {
      auto blend = [&](std::vector<ScalarGridField>& out, const std::vector<ScalarGridField>& a) {
        for (std::size_t c = 0; c < out.size(); ++c) {
          auto o = out[c].values();
          auto x = a[c].values();
          for (std::size_t p = 0; p < o.size(); ++p) o[p] = w2 * o[p] + w1 * x[p];
        }
      };
      const SliceFields& coarse = report.solutions[last - 1].slices[j];
      blend(ex.slices[j].g, coarse.g);
      blend(ex.slices[j].dg, coarse.dg);
      blend(ex.slices[j].h, coarse.h);
    }
    report.extrapolated = std::move(ex);
  }
  return report;
}

std::vector<ScalarGridField> harmonic_rate(const SliceFields& fields, Prefactor prefactor, double eps_det) {
  const GridSpec& grid = fields.grid();
  const int n = grid.n;
  const int D = n + 1;
  const int comps = sym_count(D);
  // dh[m][c] = d_m h_c, ddg[m][k][c] = d_m g_{c,k}
  std::vector<std::vector<ScalarGridField>> dh(n);
  std::vector<std::vector<std::vector<ScalarGridField>>> ddg(n, std::vector<std::vector<ScalarGridField>>(n));
  for (int m = 0; m < n; ++m) {
    for (int c = 0; c < comps; ++c) dh[m].push_back(spatial_derivative(fields.h[c], m));
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < comps; ++c) ddg[m][k].push_back(spatial_derivative(fields.dgk(k, c), m));
  }
  std::vector<ScalarGridField> out(comps, ScalarGridField(grid));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const PointMetric g = fields.metric_at(p);
    const PointMetric gi = invert_metric(g, eps_det, p);
    const MetricDerivatives dg = fields.derivatives_at(p);
    const PointMetric H = harmonic_source(g, gi, dg);
    const double P = prefactor == Prefactor::g00 ? g(0, 0) : 1.0 / gi(0, 0);
    for (int c = 0; c < comps; ++c) {
      double principal = 0;
      for (int m = 1; m < D; ++m) {
        principal += 2 * gi(0, m) * dh[m - 1][c][p];
        for (int k = 1; k < D; ++k) principal += gi(k, m) * ddg[m - 1][k - 1][c][p];
      }
      out[c][p] = -P * (principal - 2 * H.component(c));
    }
  }
  return out;
}

namespace {

// Centered time derivative of one stored family at slice j.
double time_derivative(const std::vector<SliceFields>& s, int j, double dt, int order,
                       const std::vector<ScalarGridField> SliceFields::*family, std::size_t c, std::size_t p) {
  auto v = [&](int jj) { return (s[jj].*family)[c][p]; };
  if (order == 4) return (-v(j + 2) + 8 * v(j + 1) - 8 * v(j - 1) + v(j - 2)) / (12 * dt);
  return (v(j + 1) - v(j - 1)) / (2 * dt);
}

}  // namespace

ResidualReport harmonic_residual(const History& fields, const ResidualOptions& options) {
  fields.validate();
  const int slices = fields.time.slices();
  if (slices < 3) throw Error(ErrorKind::stencil, "residual needs at least 3 time slices");
  if (options.time_order != 2 && options.time_order != 4)
    throw Error(ErrorKind::configuration, "residual time order must be 2 or 4");
  const int order = slices >= 5 ? options.time_order : 2;
  const int reach = order / 2;
  const GridSpec& grid = fields.grid;
  const int n = grid.n;
  const int comps = sym_count(n + 1);
  const double dt = fields.time.dt();
  const auto keep = options.exclusion.keep(grid);
  ResidualReport report;
  report.time_order = order;
  for (int j = reach; j < slices - reach; ++j) {
    const SliceFields& s = fields.slices[j];
    const auto rate = harmonic_rate(s, options.prefactor, options.eps_det);
    std::vector<std::vector<ScalarGridField>> dh(n);
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < comps; ++c) dh[k].push_back(spatial_derivative(s.h[c], k));
    std::array<double, 3> r{0, 0, 0};
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (keep && !keep(p)) continue;
      for (int c = 0; c < comps; ++c) {
        const double dtg = time_derivative(fields.slices, j, dt, order, &SliceFields::g, c, p);
        r[0] = std::max(r[0], std::abs(dtg - s.h[c][p]));
        const double dth = time_derivative(fields.slices, j, dt, order, &SliceFields::h, c, p);
        r[2] = std::max(r[2], std::abs(dth - rate[c][p]));
        for (int k = 0; k < n; ++k) {
          const std::size_t idx = static_cast<std::size_t>(k * comps + c);
          const double dtdg = time_derivative(fields.slices, j, dt, order, &SliceFields::dg, idx, p);
          r[1] = std::max(r[1], std::abs(dtdg - dh[k][c][p]));
        }
      }
    }
    report.per_slice.push_back(r);
    report.slices.push_back(j);
    for (int e = 0; e < 3; ++e) report.sup[e] = std::max(report.sup[e], r[e]);
  }
  return report;
}

}  // namespace nslab
