// Acceptance checks, one per criterion. Usage: acceptance <1-10>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nslab/data.hpp"
#include "nslab/diagnostics.hpp"
#include "nslab/error.hpp"
#include "nslab/heat_kernel.hpp"
#include "nslab/picard.hpp"

using namespace nslab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point start_ = Clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExclusionRegion slab(const GridSpec& grid, double radius_in_h = 4) {
  return {ExclusionRegion::Shape::slab, radius_in_h * grid.spacing(), 0};
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Largest relative change between ratio sequences over their common prefix.
double ratio_change(const ContractionRecord& a, const ContractionRecord& b) {
  double worst = 0;
  const std::size_t k = std::min(a.ratios.size(), b.ratios.size());
  for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, std::abs(b.ratios[i] / a.ratios[i] - 1));
  return worst;
}

SchemeConfig singular_scheme(double nu0) {
  SchemeConfig cfg;
  cfg.T = 0.05;
  cfg.M = 32;
  cfg.nu0 = nu0;
  cfg.tol_fix = 1e-8;
  return cfg;
}

Outcome flat_fixed_point() {
  Stopwatch clock;
  const auto data = build_flat_data(make_grid(2, 64, 1.0, true));
  SchemeConfig cfg;
  cfg.M = 16;
  const auto r = run_fixed_point(data, cfg);
  double worst_norm = 0;
  for (const auto& n : r.record.norms) worst_norm = std::max(worst_norm, n.combined());
  const double residual = harmonic_residual(r.fields()).max();
  const double constraint = constraint_monitor(r.fields()).peak;
  const double curvature = max_of(curvature_history(r.fields()).sup_outside);
  const double t = clock.seconds();
  const bool ok = r.record.converged && r.record.iterations == 1 && worst_norm < 1e-12 && residual < 1e-12 &&
                  constraint == 0.0 && curvature == 0.0 && t < 5;
  return {ok, fmt("l=%d, increments %.1e, residual %.1e, constraint %.1e, curvature %.1e, %.2f s", r.record.iterations,
                  worst_norm, residual, constraint, curvature, t)};
}

Outcome unknowns() {
  const long count = unknown_count(3);
  return {count == 50, fmt("unknown_count(3) = %ld", count)};
}

Outcome kernel_suite() {
  Stopwatch clock;
  const auto grid = make_grid(2, 64, 1.0, true);
  double mass_err = 0;
  for (double nu : {1e-1, 1e-2, 1e-3})
    for (double t : {0.01, 0.1, 1.0}) {
      const auto K = sample_kernel({nu, grid, t});
      double s = 0;
      for (double v : K.values()) s += v;
      mass_err = std::max(mass_err, std::abs(s * grid.spacing() * grid.spacing() - 1));
    }

  const double semigroup =
      (conv_spatial(sample_kernel({0.02, grid, 0.3}), sample_kernel({0.02, grid, 0.5})) - sample_kernel({0.02, grid, 0.8}))
          .sup_norm();

  const KernelSpec spec{0.02, grid, 0.3};
  const auto f = sample(grid, [](auto x) {
    return std::exp(std::sin(std::numbers::pi * x[0])) * std::cos(std::numbers::pi * x[1]);
  });
  const auto K = sample_kernel(spec);
  double rule = 0;
  for (int a = 0; a < 2; ++a) {
    const auto on_kernel = conv_spatial(f, sample_kernel_derivative(spec, a));
    rule = std::max(rule, (spatial_derivative(conv_spatial(f, K), a) - on_kernel).sup_norm());
    rule = std::max(rule, (conv_spatial(spatial_derivative(f, a), K) - on_kernel).sup_norm());
  }

  const std::vector<double> nus{1e-1, 1e-2, 1e-3, 1e-4};
  const auto table = verify_uniform_l1(nus, 0.1, grid);
  double lo = table.rows.front().l1_derivative;
  double hi = lo;
  for (const auto& row : table.rows) {
    lo = std::min(lo, row.l1_derivative);
    hi = std::max(hi, row.l1_derivative);
  }
  const double spread = hi / lo - 1;
  const double t = clock.seconds();
  const bool ok = mass_err < 1e-10 && semigroup < 1e-8 && rule < 1e-8 && spread <= 0.1 && t < 30;
  return {ok, fmt("mass %.1e, semigroup %.1e, convolution rule %.1e, derivative L1 %.4g..%.4g (spread %.0f%%), %.1f s",
                  mass_err, semigroup, rule, lo, hi, 100 * spread, t)};
}

Outcome profile_regularity() {
  Stopwatch clock;
  const SingularProfileParams p;
  auto sampled = [&](int N) {
    return sample(make_grid(1, N, 1.0, true), [&](auto x) { return singular_profile(x[0], p); });
  };
  const double h64 = sobolev_norm(sampled(64), 2.0);
  const double h128 = sobolev_norm(sampled(128), 2.0);
  const double h256 = sobolev_norm(sampled(256), 2.0);
  const double drift = std::max(std::abs(h128 / h64 - 1), std::abs(h256 / h128 - 1));

  std::vector<double> holder;
  for (int N : {128, 256, 512, 1024}) holder.push_back(holder_norm_proxy(sampled(N), 0.4));
  const bool holder_bounded =
      std::all_of(holder.begin(), holder.end(), [](double q) { return std::isfinite(q); }) &&
      max_of(holder) <= 1.5 * holder.front();

  // Envelope of |f''| by shell maxima on a dense sample, then a log-log fit.
  std::vector<double> xs;
  std::vector<double> ys;
  for (double r = 1e-6; r < 1e-4 * (1 + 1e-12); r *= std::pow(10.0, 0.25)) {
    double m = 0;
    for (int i = 0; i < 20000; ++i) m = std::max(m, std::abs(singular_profile_d2(r * (1 + 0.5 * i / 20000.0), p)));
    xs.push_back(std::log(r));
    ys.push_back(std::log(m));
  }
  const double k = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double target = 1 - 2 * p.alpha;
  const double t = clock.seconds();
  const bool ok = drift < 0.1 && holder_bounded && std::abs(slope - target) <= 0.05 && t < 60;
  return {ok, fmt("H2 %.4f/%.4f/%.4f (drift %.1f%%), Hoelder proxy max/first %.3f, f'' exponent %.4f, %.1f s", h64, h128,
                  h256, 100 * drift, max_of(holder) / holder.front(), slope, t)};
}

Outcome curvature_blowup() {
  Stopwatch clock;
  SingularProfileParams p;
  p.delta_supp = 0.1;
  p.eps_supp = 0.2;
  const auto grid = make_grid(2, 1024, 0.25, true);
  const auto data = build_singular_data(grid, p, 0.1);
  const auto R = data_slice_curvature(data);
  // The fit window stays on the cutoff plateau: outer shell edge at 0.9 delta_supp, one decade wide.
  const double shell = 1.5;
  const double r_max = 0.9 * p.delta_supp / shell;
  const auto fit = fit_blowup_exponent(R, SingularGeometry::hyperplane, geometric_radii(r_max / 10, r_max, 6), shell, 0);
  const auto keep = slab(grid).keep(grid);
  bool finite = true;
  double sup_outside = 0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    if (!keep(q)) continue;
    finite = finite && std::isfinite(R[q]);
    sup_outside = std::max(sup_outside, std::abs(R[q]));
  }
  const double t = clock.seconds();
  const bool ok = std::abs(fit.beta + 0.5) <= 0.1 && fit.residual < 0.1 && finite && t < 60;
  return {ok, fmt("beta %.3f, fit residual %.3f, sup|R| outside 4h %.3g, %.1f s", fit.beta, fit.residual, sup_outside, t)};
}

Outcome contraction() {
  Stopwatch clock;
  const auto data = build_singular_data(make_grid(2, 64, 1.0, true), {}, 0.1);
  const double nu0 = 1e-3;
  const auto coarse = run_fixed_point_auto_T(data, singular_scheme(nu0));
  SchemeConfig halved = singular_scheme(nu0 / 2);
  halved.T = coarse.record.T;
  const auto fine = run_fixed_point(data, halved);
  const double change = ratio_change(coarse.record, fine.record);
  const double t = clock.seconds();
  const bool ok = coarse.record.contracting(0.9) && fine.record.converged && change < 0.05 && t < 600;
  return {ok, fmt("T %.4g, %d iterations, streak %d at c <= 0.9, ratio change %.2f%% under nu0 halving, %.1f s",
                  coarse.record.T, coarse.record.iterations, coarse.record.longest_streak(0.9), 100 * change, t)};
}

Outcome residual_of_limit() {
  Stopwatch clock;
  const auto grid = make_grid(2, 128, 1.0, true);
  const auto data = build_singular_data(grid, {}, 0.1);
  SchemeConfig cfg = singular_scheme(1e-2);
  cfg.T = 0.025;
  const std::vector<double> nus{1e-2, 5e-3, 2.5e-3};
  const auto exclusion = slab(grid);
  const auto sweep = viscosity_sweep(data, cfg, nus, exclusion);
  bool decreasing = sweep.distances.size() == nus.size() - 1;
  std::string steps;
  for (std::size_t i = 1; i < sweep.distances.size(); ++i) {
    const double drop = 1 - sweep.distances[i] / sweep.distances[i - 1];
    decreasing = decreasing && drop >= 0.3;
    steps += fmt("%s%.1f%%", steps.empty() ? "" : ",", 100 * drop);
  }
  ResidualOptions options;
  options.exclusion = exclusion;
  const double residual = harmonic_residual(sweep.solutions.back(), options).max();

  SchemeConfig wave_cfg = cfg;
  wave_cfg.nu0 = nus.back();
  const auto wave = run_fixed_point(build_gauge_wave_data(grid, GaugeWave{}), wave_cfg);
  const double baseline = harmonic_residual(wave.fields()).max();
  const double t = clock.seconds();
  const bool ok = decreasing && residual <= 10 * baseline && t < 1800;
  return {ok, fmt("distances %.4g,%.4g (drop %s), residual %.3g vs gauge-wave baseline %.3g (ratio %.0f), %.0f s",
                  sweep.distances.at(0), sweep.distances.at(1), steps.c_str(), residual, baseline, residual / baseline, t)};
}

Outcome constraint_propagation() {
  Stopwatch clock;
  const auto grid = make_grid(2, 64, 1.0, true);
  DataOptions options;
  options.h0_mode = InitialRateMode::harmonic;
  const auto data = build_singular_data(grid, {}, 0.1, options);
  const auto r = run_fixed_point_auto_T(data, singular_scheme(1e-3));
  const auto exclusion = slab(grid);
  const auto series = constraint_monitor(r.fields(), exclusion);
  ResidualOptions ro;
  ro.exclusion = exclusion;
  const double residual = harmonic_residual(r.fields(), ro).max();
  const double eps0 = series.initial;
  const double t = clock.seconds();
  const bool ok = r.record.converged && series.peak <= 10 * (eps0 + residual);
  return {ok, fmt("eps0 %.2e, sup|Gamma| over [0,T] %.3e, residual level %.3e, %.1f s", eps0, series.peak, residual, t)};
}

Outcome gap_accessibility() {
  Stopwatch clock;
  const auto grid = make_grid(2, 64, 1.0, true);
  const auto data = build_singular_data(grid, {}, 0.1);
  SchemeConfig cfg = singular_scheme(1e-3);
  cfg.T = 0.025;
  cfg.M = 16;
  const auto r = run_fixed_point(data, cfg);
  const double h = grid.spacing();
  const std::array<double, 4> from{0.0, 0.5, 0.3, 0.0};
  const std::array<double, 4> to{cfg.T, 0.5 * h, 0.5 * h, 0.0};
  auto curve = [&](const std::function<double(double)>& warp) {
    std::vector<double> s;
    std::vector<std::array<double, 4>> x;
    for (int j = 0; j <= 400; ++j) {
      const double u = j / 400.0;
      const double w = warp(u);
      s.push_back(u);
      std::array<double, 4> pt{};
      for (int a = 0; a < 3; ++a) pt[a] = from[a] + w * (to[a] - from[a]);
      x.push_back(pt);
    }
    return make_curve(3, s, x);
  };
  const auto plain = curve([](double u) { return u; });
  const auto warped = curve([](double u) { return 0.5 * u + 0.5 * u * u * (3 - 2 * u); });
  bool ok = r.record.converged;
  std::string detail;
  for (auto conv : {GapConvention::as_written, GapConvention::root_sum_squares}) {
    const double a = gap_length(plain, r.fields(), conv);
    const double b = gap_length(warped, r.fields(), conv);
    const double rel = std::abs(a - b) / std::abs(a);
    ok = ok && std::isfinite(a) && std::isfinite(b) && rel <= 1e-3;
    detail += fmt("%s %.6g (reparam %.1e), ", conv == GapConvention::as_written ? "as written" : "root sum squares", a, rel);
  }
  const double t = clock.seconds();
  ok = ok && t < 10;
  return {ok, detail + fmt("%.1f s", t)};
}

Outcome gauge_wave_order() {
  Stopwatch clock;
  const GaugeWave wave;
  std::vector<double> res;
  for (int level = 0; level < 3; ++level) {
    const int N = 32 << level;
    const int M = 8 << level;
    res.push_back(harmonic_residual(wave.history(make_grid(2, N, 1.0, true), TimeGrid{0.1, M})).max());
  }
  const double o1 = std::log2(res[0] / res[1]);
  const double o2 = std::log2(res[1] / res[2]);
  const double t = clock.seconds();
  const bool ok = o1 >= 2 && o2 >= 2 && t < 300;
  return {ok, fmt("residuals %.2e/%.2e/%.2e, orders %.2f %.2f, %.1f s", res[0], res[1], res[2], o1, o2, t)};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"flat-space fixed point", flat_fixed_point},
    {"unknown count", unknowns},
    {"kernel suite", kernel_suite},
    {"singular-profile regularity", profile_regularity},
    {"data-slice curvature blow-up", curvature_blowup},
    {"contraction", contraction},
    {"residual of the limit", residual_of_limit},
    {"constraint propagation", constraint_propagation},
    {"gap length accessibility", gap_accessibility},
    {"gauge-wave oracle", gauge_wave_order},
};

}  // namespace

int main(int argc, char** argv) {
  constexpr int count = static_cast<int>(std::size(kCriteria));
  std::vector<int> which;
  if (argc > 1) {
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  } else {
    for (int i = 1; i <= count; ++i) which.push_back(i);
  }
  int failures = 0;
  for (int id : which) {
    if (id < 1 || id > count) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    const Criterion& c = kCriteria[id - 1];
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %2d %s  %s: %s\n", id, out.passed ? "PASS" : "FAIL", c.name, out.detail.c_str());
    std::fflush(stdout);
    failures += out.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
