#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nslab/checkpoint.hpp"
#include "nslab/data.hpp"
#include "nslab/error.hpp"
#include "nslab/picard.hpp"

using namespace nslab;

namespace {

SchemeConfig quick_scheme(double T = 0.05, int M = 8, double nu0 = 1e-2) {
  SchemeConfig cfg;
  cfg.T = T;
  cfg.M = M;
  cfg.nu0 = nu0;
  cfg.max_iters = 40;
  return cfg;
}

double slice_distance(const SliceFields& a, const SliceFields& b) {
  const SliceFields d = a - b;
  double s = 0;
  for (const auto* fam : {&d.g, &d.dg, &d.h})
    for (const auto& f : *fam) s = std::max(s, f.sup_norm());
  return s;
}

}  // namespace

TEST_SUITE("picard_evolution") {
  TEST_CASE("flat data is a fixed point") {
    const auto data = build_flat_data(make_grid(2, 32, 1.0, true));
    const auto cfg = quick_scheme();
    const auto init = init_iteration(data, cfg);
    CHECK(init.l == 0);
    for (const auto& s : init.current.slices) CHECK(slice_distance(s, data.fields) == 0.0);
    const auto step = picard_step(init, cfg);
    REQUIRE(step.increment_norms.size() == 1);
    CHECK(step.increment_norms.back().combined() == 0.0);

    const auto run = run_fixed_point(data, cfg);
    CHECK(run.record.converged);
    CHECK(run.record.iterations == 1);
    CHECK(run.record.ratios.empty());
  }

  TEST_CASE("inadmissible data are gated") {
    auto data = build_flat_data(make_grid(1, 16, 1.0, true));
    data.admissibility->passed = false;
    try {
      init_iteration(data, quick_scheme());
      FAIL("expected a gate error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::gate);
    }
    data.admissibility.reset();
    CHECK_THROWS_AS(init_iteration(data, quick_scheme()), Error);
  }

  TEST_CASE("initial iterate smooths the data") {
    const auto grid = make_grid(1, 128, 1.0, true);
    const auto data = build_singular_data(grid, {}, 0.1);
    const auto init = init_iteration(data, quick_scheme(0.05, 8));
    const int c11 = sym_index(1, 1, 2);
    auto curvature_sup = [&](int j) {
      return spatial_derivative(init.current.slices[j].dgk(0, c11), 0).sup_norm();
    };
    CHECK(curvature_sup(1) > curvature_sup(4));
    CHECK(curvature_sup(4) > curvature_sup(8));
    for (const auto& s : init.current.slices)
      for (const auto& h : s.h) CHECK(h.sup_norm() == 0.0);
  }

  TEST_CASE("increments vanish on the data slice") {
    const auto data = build_singular_data(make_grid(2, 32, 1.0, true), {}, 0.1);
    const auto cfg = quick_scheme();
    auto state = init_iteration(data, cfg);
    for (int l = 0; l < 3; ++l) {
      const auto next = picard_step(state, cfg);
      CHECK(slice_distance(next.current.slices.front(), data.fields) == 0.0);
      CHECK(slice_distance(next.current.slices.front(), state.current.slices.front()) == 0.0);
      const auto& norms = next.increment_norms.back();
      CHECK(norms.combined() > 0);
      CHECK(std::isfinite(norms.combined()));
      state = next;
    }
  }

  TEST_CASE("converged state is consistent under one more step") {
    const auto data = build_singular_data(make_grid(1, 64, 1.0, true), {}, 0.1);
    const auto cfg = quick_scheme(0.05, 16);
    const auto run = run_fixed_point(data, cfg);
    REQUIRE(run.record.converged);
    const auto again = picard_step(run.state, cfg);
    CHECK(again.increment_norms.back().sup() <= cfg.tol_fix);
    CHECK(run.record.contracting(cfg.tol_contract));
  }

  TEST_CASE("large horizon fails to contract") {
    SingularProfileParams p;
    const auto data = build_singular_data(make_grid(1, 64, 1.0, true), p, 0.4);
    auto cfg = quick_scheme(40.0, 16, 1e-2);
    cfg.max_iters = 60;
    bool failed = false;
    try {
      const auto r = run_fixed_point(data, cfg);
      failed = !r.record.converged;
    } catch (const ContractionFailure& e) {
      failed = true;
      CHECK(e.kind() == ErrorKind::contraction_failure);
      CHECK(e.ratios().size() >= 3);
    } catch (const Error& e) {
      // Signature loss or divergence are also failures of the long horizon.
      failed = e.kind() == ErrorKind::signature_loss || e.kind() == ErrorKind::divergence ||
               e.kind() == ErrorKind::degenerate_metric;
    }
    CHECK(failed);
  }

  TEST_CASE("automatic horizon selection halves T") {
    const auto data = build_singular_data(make_grid(1, 64, 1.0, true), {}, 0.1);
    auto cfg = quick_scheme(0.4, 16);
    cfg.tol_contract = 0.5;
    const auto r = run_fixed_point_auto_T(data, cfg, 6);
    CHECK(r.record.converged);
    CHECK(r.record.contracting(0.5));
    REQUIRE(!r.record.T_attempts.empty());
    CHECK(r.record.T == doctest::Approx(r.record.T_attempts.back()));
    for (std::size_t i = 1; i < r.record.T_attempts.size(); ++i)
      CHECK(r.record.T_attempts[i] == doctest::Approx(r.record.T_attempts[i - 1] / 2));
  }

  TEST_CASE("contraction record bookkeeping") {
    ContractionRecord rec;
    rec.converged = true;
    rec.ratios = {1.2, 0.8, 0.7, 0.6};
    CHECK(rec.longest_streak(0.9) == 3);
    CHECK(rec.contracting(0.9));
    rec.ratios = {0.5, 0.95, 0.5};
    CHECK_FALSE(rec.contracting(0.9));
    rec.ratios = {0.5, 0.4};
    CHECK(rec.contracting(0.9));
    rec.converged = false;
    CHECK_FALSE(rec.contracting(0.9));
  }

  TEST_CASE("time reversal of time-symmetric data") {
    const auto grid = make_grid(1, 64, 1.0, true);
    const auto data = build_singular_data(grid, {}, 0.1);
    const auto cfg = quick_scheme(0.0125, 16, 1e-4);
    const auto forward = run_fixed_point(data, cfg);
    REQUIRE(forward.record.converged);
    SliceFields end = forward.fields().slices.back();
    for (auto& h : end.h) h *= -1.0;
    auto reversed = data_from_slice(end, "reversed");
    reversed.admissibility = check_admissible(reversed, default_sobolev_index(1));
    const auto backward = run_fixed_point(reversed, cfg);
    REQUIRE(backward.record.converged);
    SliceFields back = backward.fields().slices.back();
    for (auto& h : back.h) h *= -1.0;
    const double travelled = slice_distance(end, data.fields);
    const double returned = slice_distance(back, data.fields);
    // The remaining gap comes from viscosity, which acts in both directions.
    CHECK(returned < 0.05 * travelled);
  }

  TEST_CASE("contraction ratios are insensitive to halving the viscosity") {
    // Holds once nu0 k_max^2 T is small, i.e. the grid rather than the viscosity cuts off the spectrum.
    const auto data = build_singular_data(make_grid(1, 64, 1.0, true), {}, 0.1);
    const auto a = run_fixed_point(data, quick_scheme(0.025, 32, 1e-3));
    const auto b = run_fixed_point(data, quick_scheme(0.025, 32, 5e-4));
    REQUIRE(a.record.ratios.size() >= 3);
    const std::size_t common = std::min(a.record.ratios.size(), b.record.ratios.size());
    for (std::size_t l = 0; l < common; ++l) CHECK(std::abs(b.record.ratios[l] / a.record.ratios[l] - 1) < 0.05);
  }

  TEST_CASE("viscosity sweep of flat data and degenerate sequences") {
    const auto data = build_flat_data(make_grid(2, 32, 1.0, true));
    const std::vector<double> nus{4e-2, 2e-2, 1e-2};
    const auto sweep = viscosity_sweep(data, quick_scheme(0.1, 8), nus);
    REQUIRE(sweep.distances.size() == 2);
    for (double d : sweep.distances) CHECK(d == 0.0);
    CHECK(sweep.extrapolated.has_value());

    const std::vector<double> single{1e-2};
    const auto one = viscosity_sweep(data, quick_scheme(0.1, 8), single);
    CHECK(one.distances.empty());
    CHECK_FALSE(one.extrapolated.has_value());

    const std::vector<double> tiny{1e-2, 1e-6};
    CHECK_THROWS_AS(viscosity_sweep(data, quick_scheme(0.05, 8), tiny), Error);
    CHECK_NOTHROW(viscosity_sweep(data, quick_scheme(0.05, 8), tiny, {}, ResolutionPolicy{false}));
    const std::vector<double> rising{1e-2, 2e-2};
    CHECK_THROWS_AS(viscosity_sweep(data, quick_scheme(0.05, 8), rising), Error);
  }

  TEST_CASE("resolution policy") {
    const auto g = make_grid(2, 64, 1.0, true);
    const double h = g.spacing();
    CHECK(viscosity_resolved(h * h, g, 1.0));
    CHECK_FALSE(viscosity_resolved(0.5 * h * h, g, 1.0));
    CHECK_FALSE(viscosity_resolved(1e-2, g, 1e-3));
  }

  TEST_CASE("residual of flat and exact gauge-wave histories") {
    const auto grid = make_grid(2, 32, 1.0, true);
    const TimeGrid time{0.1, 16};
    const auto flat = run_fixed_point(build_flat_data(grid), quick_scheme(0.1, 16));
    CHECK(harmonic_residual(flat.fields()).max() < 1e-12);

    const GaugeWave wave{0.1, 2.0};
    auto residual = [&](int N, int M) {
      return harmonic_residual(wave.history(make_grid(1, N, 1.0, true), TimeGrid{0.1, M})).max();
    };
    const double r1 = residual(32, 8);
    const double r2 = residual(64, 16);
    CHECK(std::log2(r1 / r2) >= 2.0);

    ResidualOptions second;
    second.time_order = 2;
    const auto coarse = harmonic_residual(wave.history(make_grid(1, 32, 1.0, true), TimeGrid{0.1, 8}), second);
    CHECK(coarse.time_order == 2);
    CHECK(coarse.max() > r1);

    History two{grid, TimeGrid{0.1, 2}, {}};
    two.slices.assign(2, build_flat_data(grid).fields);
    CHECK_THROWS_AS(harmonic_residual(two), Error);
  }

  TEST_CASE("checkpoint round trip and resume") {
    const auto data = std::make_shared<const DataList>(build_singular_data(make_grid(1, 32, 1.0, true), {}, 0.1));
    const auto cfg = quick_scheme(0.05, 8);
    const auto dir = std::filesystem::temp_directory_path() / "nslab_checkpoint_test";
    std::filesystem::remove_all(dir);

    auto state = init_iteration(data, cfg);
    for (int l = 0; l < 3; ++l) state = picard_step(state, cfg);
    write_checkpoint(dir, state, cfg, "abc123");
    const auto cp = read_checkpoint(dir, data);
    CHECK(cp.config_hash == "abc123");
    CHECK(cp.nu0 == cfg.nu0);
    CHECK(cp.state.l == 3);
    REQUIRE(cp.state.increment_norms.size() == state.increment_norms.size());
    for (std::size_t j = 0; j < state.current.slices.size(); ++j)
      CHECK(slice_distance(cp.state.current.slices[j], state.current.slices[j]) == 0.0);

    FixedPointOptions resume;
    resume.resume = cp.state;
    const auto resumed = run_fixed_point(*data, cfg, resume);
    FixedPointOptions fresh_opts;
    const auto fresh = run_fixed_point(*data, cfg, fresh_opts);
    CHECK(resumed.record.iterations == fresh.record.iterations);
    for (std::size_t j = 0; j < fresh.fields().slices.size(); ++j)
      CHECK(slice_distance(resumed.fields().slices[j], fresh.fields().slices[j]) == 0.0);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(read_checkpoint(dir, data), Error);
  }
}
