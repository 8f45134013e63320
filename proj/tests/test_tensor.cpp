#include <doctest.h>

#include <cmath>
#include <random>

#include "nslab/error.hpp"
#include "nslab/fields.hpp"
#include "nslab/tensor.hpp"

using namespace nslab;

namespace {

// Quadratic metric g(x) = eta + A + B_r x^r + C_rs x^r x^s / 2 in 2+1 dimensions.
struct QuadraticMetric {
  std::array<double, 6> A{};
  std::array<std::array<double, 3>, 6> B{};
  std::array<std::array<std::array<double, 3>, 3>, 6> C{};

  PointMetric g(const std::array<double, 3>& x) const {
    PointMetric m = PointMetric::minkowski(3);
    for (int c = 0; c < 6; ++c) {
      double v = A[c];
      for (int r = 0; r < 3; ++r) {
        v += B[c][r] * x[r];
        for (int s = 0; s < 3; ++s) v += 0.5 * C[c][r][s] * x[r] * x[s];
      }
      m.component(c) += v;
    }
    return m;
  }
  MetricDerivatives dg(const std::array<double, 3>& x) const {
    MetricDerivatives d;
    d.dim = 3;
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 3; ++r) {
        double v = B[c][r];
        for (int s = 0; s < 3; ++s) v += C[c][r][s] * x[s];
        d.d[r][c] = v;
      }
    return d;
  }
  MetricSecondDerivatives ddg() const {
    MetricSecondDerivatives d;
    d.dim = 3;
    for (int c = 0; c < 6; ++c)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) d.d[r][s][c] = C[c][r][s];
    return d;
  }
};

// Coefficients printed by tests/oracles/ricci_point.py (component order 00, 01, 02, 11, 12, 22).
QuadraticMetric oracle_metric() {
  QuadraticMetric q;
  q.A = {0, 0.12, 0.07, 0.17, 0.14, -0.08};
  q.B = {{{-0.11, 0.05, -0.17}, {-0.07, -0.18, -0.15}, {-0.17, 0.16, -0.13},
          {0.05, -0.17, -0.06}, {-0.13, 0.16, -0.01}, {0.03, -0.14, 0.15}}};
  q.C = {{{{{-0.16, 0.14, -0.14}, {0.14, 0.03, 0.17}, {-0.14, 0.17, -0.17}}},
          {{{0.07, 0.06, -0.16}, {0.06, -0.05, -0.15}, {-0.16, -0.15, 0.15}}},
          {{{-0.06, 0.2, 0.2}, {0.2, 0.17, -0.17}, {0.2, -0.17, 0.16}}},
          {{{-0.18, 0.15, -0.12}, {0.15, -0.02, 0.06}, {-0.12, 0.06, -0.11}}},
          {{{0.15, -0.09, -0.14}, {-0.09, 0.17, 0.16}, {-0.14, 0.16, 0.2}}},
          {{{-0.16, 0.16, -0.17}, {0.16, 0.19, -0.07}, {-0.17, -0.07, 0.11}}}}};
  return q;
}

QuadraticMetric random_metric(std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> u(-1, 1);
  QuadraticMetric q;
  for (int c = 0; c < 6; ++c) {
    q.A[c] = amplitude * u(rng);
    for (int r = 0; r < 3; ++r) {
      q.B[c][r] = amplitude * u(rng);
      for (int s = r; s < 3; ++s) q.C[c][r][s] = q.C[c][s][r] = amplitude * u(rng);
    }
  }
  return q;
}

CurvaturePoint curvature_at(const QuadraticMetric& q, const std::array<double, 3>& x) {
  const auto g = q.g(x);
  const auto gi = invert_metric(g);
  const auto dg = q.dg(x);
  const auto gamma = christoffel(gi, dg);
  return ricci_point(gi, gamma, christoffel_derivatives(gi, gamma, dg, q.ddg()));
}

// Term-by-term H_{mu nu} with upper-index Christoffels and the loop order of the written formula.
PointMetric reference_harmonic_source(const PointMetric& g, const PointMetric& gi, const MetricDerivatives& dg) {
  const int D = g.dim();
  double Gam[4][4][4] = {};
  for (int m = 0; m < D; ++m)
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b)
        for (int r = 0; r < D; ++r) Gam[m][a][b] += 0.5 * gi(m, r) * (dg(b, r, a) + dg(a, r, b) - dg(r, a, b));
  double con[4] = {};
  for (int m = 0; m < D; ++m)
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) con[m] += gi(a, b) * Gam[m][a][b];
  PointMetric H(D);
  for (int mu = 0; mu < D; ++mu)
    for (int nu = mu; nu < D; ++nu) {
      double quad = 0;
      for (int al = 0; al < D; ++al)
        for (int be = 0; be < D; ++be)
          for (int de = 0; de < D; ++de)
            for (int ep = 0; ep < D; ++ep) quad += gi(al, be) * g(de, ep) * Gam[de][mu][be] * Gam[ep][nu][al];
      double lin = 0;
      for (int al = 0; al < D; ++al) lin += dg(al, mu, nu) * con[al];
      double t2 = 0;
      double t3 = 0;
      for (int rho = 0; rho < D; ++rho)
        for (int al = 0; al < D; ++al)
          for (int be = 0; be < D; ++be)
            for (int eta = 0; eta < D; ++eta)
              for (int si = 0; si < D; ++si) {
                const double w = Gam[rho][al][be] * gi(al, eta) * gi(be, si);
                t2 += g(nu, rho) * w * dg(mu, eta, si);
                t3 += g(mu, rho) * w * dg(nu, eta, si);
              }
      H.set(mu, nu, quad + 0.5 * (lin + t2 + t3));
    }
  return H;
}

}  // namespace

TEST_SUITE("tensor_core") {
  TEST_CASE("metric inverse examples") {
    const auto eta = PointMetric::minkowski(4);
    const auto ei = invert_metric(eta);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) CHECK(ei(a, b) == eta(a, b));
    const auto d = invert_metric(PointMetric::diagonal({-2, 0.5, 0.5}));
    CHECK(d(0, 0) == doctest::Approx(-0.5));
    CHECK(d(1, 1) == doctest::Approx(2.0));
    CHECK(d(2, 2) == doctest::Approx(2.0));
    CHECK(d(0, 1) == 0.0);
  }

  TEST_CASE("random inverses and the trace identity") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      const int D = 2 + trial % 3;
      const auto g = random_metric(rng, 0.3).g({0, 0, 0});
      PointMetric m(D);
      for (int a = 0; a < D; ++a)
        for (int b = a; b < D; ++b) m.set(a, b, a < 3 && b < 3 ? g(a, b) : (a == b ? 1.0 : 0.05));
      const auto mi = invert_metric(m);
      double trace = 0;
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          double s = 0;
          for (int c = 0; c < D; ++c) s += m(a, c) * mi(c, b);
          CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-10);
          trace += mi(a, b) * m(a, b);
        }
      CHECK(std::abs(trace - D) < 1e-10);
    }
  }

  TEST_CASE("degenerate metrics report determinant and location") {
    PointMetric g = PointMetric::diagonal({-1, 1, 0});
    try {
      invert_metric(g, 1e-10, 42);
      FAIL("expected a degenerate-metric error");
    } catch (const DegenerateMetricError& e) {
      CHECK(e.det() == 0.0);
      CHECK(e.kind() == ErrorKind::degenerate_metric);
    }
  }

  TEST_CASE("Christoffel symbols of flat and one-dimensional metrics") {
    MetricDerivatives zero;
    zero.dim = 3;
    const auto flat = christoffel(PointMetric::minkowski(3), zero);
    for (int m = 0; m < 3; ++m) {
      CHECK(flat.contracted[m] == 0.0);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(flat.gamma[m][a][b] == 0.0);
    }

    const double eps = 0.3;
    for (double x : {-0.5, 0.0, 0.7}) {
      const auto g = PointMetric::diagonal({-1, 1 + eps * x, 1});
      MetricDerivatives dg;
      dg.dim = 3;
      dg.set(1, 1, 1, eps);
      const auto c = christoffel(invert_metric(g), dg);
      CHECK(c.gamma[1][1][1] == doctest::Approx(eps / (2 * (1 + eps * x))).epsilon(1e-14));
    }
  }

  TEST_CASE("Christoffel symmetry on random samples") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const auto q = random_metric(rng, 0.2);
      const auto c = christoffel(invert_metric(q.g({0, 0, 0})), q.dg({0.1, -0.2, 0.3}));
      for (int m = 0; m < 3; ++m)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) CHECK(c.gamma[m][a][b] == c.gamma[m][b][a]);
    }
  }

  TEST_CASE("Ricci of a generic quadratic metric matches the symbolic oracle") {
    const auto cp = curvature_at(oracle_metric(), {0, 0, 0});
    CHECK(cp.scalar == doctest::Approx(-1.1926233763580446).epsilon(1e-12));
    CHECK(cp.ricci(0, 1) == doctest::Approx(-0.37405752689944330).epsilon(1e-12));
  }

  TEST_CASE("flat space-time has zero curvature") {
    QuadraticMetric q;
    const auto cp = curvature_at(q, {0.2, 0.1, -0.3});
    CHECK(cp.scalar == 0.0);
  }

  TEST_CASE("linearized curvature scales with the perturbation amplitude") {
    std::mt19937_64 rng(9);
    const auto shape = random_metric(rng, 1.0);
    auto scaled = [&](double a) {
      QuadraticMetric q = shape;
      for (int c = 0; c < 6; ++c) {
        q.A[c] *= a;
        for (int r = 0; r < 3; ++r) {
          q.B[c][r] *= a;
          for (int s = 0; s < 3; ++s) q.C[c][r][s] *= a;
        }
      }
      return std::abs(curvature_at(q, {0, 0, 0}).scalar);
    };
    const double slope = std::log10(scaled(1e-3) / scaled(1e-4));
    CHECK(slope == doctest::Approx(1.0).epsilon(0.01));
  }

  TEST_CASE("chain-rule Christoffel derivatives match finite differences") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
      const auto q = random_metric(rng, 0.2);
      const std::array<double, 3> x0{0.05, -0.1, 0.2};
      const auto gi = invert_metric(q.g(x0));
      const auto dg = q.dg(x0);
      const auto gamma = christoffel(gi, dg);
      const auto dgamma = christoffel_derivatives(gi, gamma, dg, q.ddg());
      const double e = 1e-5;
      for (int r = 0; r < 3; ++r) {
        auto xp = x0;
        auto xm = x0;
        xp[r] += e;
        xm[r] -= e;
        const auto gp = christoffel(invert_metric(q.g(xp)), q.dg(xp));
        const auto gm = christoffel(invert_metric(q.g(xm)), q.dg(xm));
        for (int m = 0; m < 3; ++m)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              const double fd = (gp.gamma[m][a][b] - gm.gamma[m][a][b]) / (2 * e);
              CHECK(std::abs(dgamma.d[r][m][a][b] - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
            }
      }
    }
  }

  TEST_CASE("harmonic source matches an independent implementation") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
      const auto q = random_metric(rng, 0.1);
      const std::array<double, 3> x{0.1, 0.2, -0.1};
      const auto g = q.g(x);
      const auto gi = invert_metric(g);
      const auto dg = q.dg(x);
      const auto H = harmonic_source(g, gi, dg);
      const auto ref = reference_harmonic_source(g, gi, dg);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(std::abs(H(a, b) - ref(a, b)) < 1e-12);
    }
    MetricDerivatives zero;
    zero.dim = 4;
    const auto flat = harmonic_source(PointMetric::minkowski(4), PointMetric::minkowski(4), zero);
    for (int c = 0; c < 10; ++c) CHECK(flat.component(c) == 0.0);
  }

  TEST_CASE("harmonic source for a metric with vanishing contracted Christoffels") {
    // Flat metric with random derivatives; the time derivatives g_{0 rho,0} absorb Gamma_rho so that Gamma^mu = 0.
    std::mt19937_64 rng(41);
    auto dg = random_metric(rng, 0.3).dg({0, 0, 0});
    const auto g = PointMetric::minkowski(3);
    const auto before = christoffel(g, dg);
    // Gamma_0 carries -d_0 g_00 / 2, Gamma_i carries -d_0 g_0i.
    dg.set(0, 0, 0, dg(0, 0, 0) + 2 * (-before.contracted[0]));
    for (int i = 1; i < 3; ++i) dg.set(0, 0, i, dg(0, 0, i) + before.contracted[i]);
    const auto gamma = christoffel(g, dg);
    for (int m = 0; m < 3; ++m) CHECK(std::abs(gamma.contracted[m]) < 1e-15);
    double largest = 0;
    for (int m = 0; m < 3; ++m)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) largest = std::max(largest, std::abs(gamma.gamma[m][a][b]));
    CHECK(largest > 0.01);
    const auto H = harmonic_source(g, g, dg);
    const auto ref = reference_harmonic_source(g, g, dg);
    double sup = 0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        CHECK(std::abs(H(a, b) - ref(a, b)) < 1e-12);
        sup = std::max(sup, std::abs(H(a, b)));
      }
    CHECK(sup > 1e-3);
  }

  TEST_CASE("signature examples") {
    const auto m = signature(PointMetric::minkowski(3));
    CHECK(m.negative == 1);
    CHECK(m.positive == 2);
    CHECK(m.margin == doctest::Approx(1.0));
    const auto d = signature(PointMetric::diagonal({-0.5, 2, 3}));
    CHECK(d.negative == 1);
    CHECK(d.positive == 2);
    CHECK(d.margin == doctest::Approx(0.5));
    const auto z = signature(PointMetric::diagonal({-1, 0, 1}));
    CHECK(z.degenerate);
    CHECK(z.margin == doctest::Approx(0.0));
  }

  TEST_CASE("uniform Lorentz margin of slices") {
    const auto grid = make_grid(2, 16, 1.0, true);
    auto slice = SliceFields::zeros(grid);
    slice.g[sym_index(0, 0, 3)] = ScalarGridField(grid, -1.0);
    slice.g[sym_index(1, 1, 3)] = ScalarGridField(grid, 1.0);
    slice.g[sym_index(2, 2, 3)] = ScalarGridField(grid, 1.0);
    CHECK(uniform_lorentz_margin(slice) == doctest::Approx(1.0));

    slice.g[sym_index(1, 1, 3)] = sample(grid, [](auto x) { return 1 + 0.1 * std::cos(3 * x[0]); });
    const auto report = lorentz_report(slice);
    CHECK(report.margin >= 0.9);
    CHECK(report.one_negative_everywhere);

    slice.g[sym_index(1, 1, 3)][37] = -0.5;
    const auto flipped = lorentz_report(slice);
    CHECK(flipped.margin == 0.0);
    CHECK(flipped.first_failure == 37);
  }

  TEST_CASE("unknown count") {
    CHECK(unknown_count(3) == 50);
    CHECK(unknown_count(2) == 24);
    CHECK(unknown_count(1) == 9);
  }
}
