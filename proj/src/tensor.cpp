#include "nslab/tensor.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nslab/error.hpp"

namespace nslab {

std::pair<int, int> sym_pair(int component, int dim) {
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = mu; nu < dim; ++nu)
      if (sym_index(mu, nu, dim) == component) return {mu, nu};
  throw Error(ErrorKind::shape, "symmetric component index out of range");
}

PointMetric PointMetric::minkowski(int dim) {
  PointMetric g(dim);
  g.set(0, 0, -1.0);
  for (int i = 1; i < dim; ++i) g.set(i, i, 1.0);
  return g;
}

PointMetric PointMetric::diagonal(std::initializer_list<double> entries) {
  PointMetric g(static_cast<int>(entries.size()));
  int i = 0;
  for (double e : entries) {
    g.set(i, i, e);
    ++i;
  }
  return g;
}

namespace {

using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

Mat dense(const PointMetric& g) {
  Mat a{};
  for (int i = 0; i < g.dim(); ++i)
    for (int j = 0; j < g.dim(); ++j) a[i][j] = g(i, j);
  return a;
}

// Gauss-Jordan with partial pivoting; returns the determinant, writes the inverse when nonzero.
double gauss_jordan(Mat a, int n, Mat& inv) {
  inv = Mat{};
  for (int i = 0; i < n; ++i) inv[i][i] = 1.0;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (a[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
      det = -det;
    }
    const double p = a[col][col];
    det *= p;
    for (int j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return det;
}

}  // namespace

double determinant(const PointMetric& g) {
  Mat inv;
  return gauss_jordan(dense(g), g.dim(), inv);
}

PointMetric invert_metric(const PointMetric& g, double eps_det, std::size_t location) {
  Mat inv;
  const double det = gauss_jordan(dense(g), g.dim(), inv);
  if (!(std::abs(det) > eps_det)) throw DegenerateMetricError(det, location);
  PointMetric out(g.dim());
  for (int i = 0; i < g.dim(); ++i)
    for (int j = i; j < g.dim(); ++j) out.set(i, j, 0.5 * (inv[i][j] + inv[j][i]));
  return out;
}

ChristoffelPoint christoffel(const PointMetric& g_inv, const MetricDerivatives& dg) {
  const int D = g_inv.dim();
  ChristoffelPoint out;
  out.dim = D;
  Rank3 lowered{};  // lowered[rho][a][b] = Gamma_{rho a b}
  for (int rho = 0; rho < D; ++rho)
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        const double v = 0.5 * (dg(b, rho, a) + dg(a, rho, b) - dg(rho, a, b));
        lowered[rho][a][b] = v;
        lowered[rho][b][a] = v;
      }
  for (int mu = 0; mu < D; ++mu)
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        double s = 0;
        for (int rho = 0; rho < D; ++rho) s += g_inv(mu, rho) * lowered[rho][a][b];
        out.gamma[mu][a][b] = s;
        out.gamma[mu][b][a] = s;
      }
  for (int mu = 0; mu < D; ++mu) {
    double s = 0;
    for (int a = 0; a < D; ++a)
      for (int b = 0; b < D; ++b) s += g_inv(a, b) * out.gamma[mu][a][b];
    out.contracted[mu] = s;
  }
  return out;
}

ChristoffelDerivatives christoffel_derivatives(const PointMetric& g_inv, const ChristoffelPoint& gamma,
                                               const MetricDerivatives& dg, const MetricSecondDerivatives& ddg) {
  const int D = g_inv.dim();
  ChristoffelDerivatives out;
  out.dim = D;
  for (int rho = 0; rho < D; ++rho) {
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        std::array<double, kMaxDim> dlow{};  // d_rho Gamma_{s a b}
        std::array<double, kMaxDim> shift{};  // d_rho g_{s c} Gamma^c_{ab}
        for (int s = 0; s < D; ++s) {
          dlow[s] = 0.5 * (ddg(rho, b, s, a) + ddg(rho, a, s, b) - ddg(rho, s, a, b));
          double acc = 0;
          for (int c = 0; c < D; ++c) acc += dg(rho, s, c) * gamma.gamma[c][a][b];
          shift[s] = acc;
        }
        for (int mu = 0; mu < D; ++mu) {
          double v = 0;
          for (int s = 0; s < D; ++s) v += g_inv(mu, s) * (dlow[s] - shift[s]);
          out.d[rho][mu][a][b] = v;
          out.d[rho][mu][b][a] = v;
        }
      }
  }
  return out;
}

CurvaturePoint ricci_point(const PointMetric& g_inv, const ChristoffelPoint& gamma,
                           const ChristoffelDerivatives& dgamma) {
  const int D = g_inv.dim();
  const auto& G = gamma.gamma;
  const auto& dG = dgamma.d;
  auto component = [&](int mu, int nu) {
    double r = 0;
    for (int a = 0; a < D; ++a) {
      r += dG[a][a][mu][nu] - dG[nu][a][a][mu];
      for (int b = 0; b < D; ++b) r += G[a][a][b] * G[b][mu][nu] - G[a][nu][b] * G[b][mu][a];
    }
    return r;
  };
  CurvaturePoint out;
  out.ricci = PointMetric(D);
  for (int mu = 0; mu < D; ++mu)
    for (int nu = mu; nu < D; ++nu) out.ricci.set(mu, nu, 0.5 * (component(mu, nu) + component(nu, mu)));
  double R = 0;
  for (int mu = 0; mu < D; ++mu)
    for (int nu = 0; nu < D; ++nu) R += g_inv(mu, nu) * out.ricci(mu, nu);
  out.scalar = R;
  return out;
}

PointMetric harmonic_source(const PointMetric& g, const PointMetric& g_inv, const MetricDerivatives& dg) {
  return harmonic_source(g, g_inv, dg, christoffel(g_inv, dg));
}

PointMetric harmonic_source(const PointMetric& g, const PointMetric& g_inv, const MetricDerivatives& dg,
                            const ChristoffelPoint& gamma) {
  const int D = g.dim();
  const auto& G = gamma.gamma;
  // low[e][m][b] = g_{e d} Gamma^d_{m b}
  Rank3 low{};
  for (int e = 0; e < D; ++e)
    for (int m = 0; m < D; ++m)
      for (int b = 0; b < D; ++b) {
        double s = 0;
        for (int d = 0; d < D; ++d) s += g(e, d) * G[d][m][b];
        low[e][m][b] = s;
      }
  // up[nu][eta][sigma] = Gamma_{nu a b} g^{a eta} g^{b sigma}
  Rank3 half{};
  for (int nu = 0; nu < D; ++nu)
    for (int a = 0; a < D; ++a)
      for (int s = 0; s < D; ++s) {
        double acc = 0;
        for (int b = 0; b < D; ++b) acc += low[nu][a][b] * g_inv(b, s);
        half[nu][a][s] = acc;
      }
  Rank3 up{};
  for (int nu = 0; nu < D; ++nu)
    for (int eta = 0; eta < D; ++eta)
      for (int s = 0; s < D; ++s) {
        double acc = 0;
        for (int a = 0; a < D; ++a) acc += g_inv(a, eta) * half[nu][a][s];
        up[nu][eta][s] = acc;
      }
  // w[nu][mu] = up[nu]^{eta sigma} d_mu g_{eta sigma}
  std::array<std::array<double, kMaxDim>, kMaxDim> w{};
  for (int nu = 0; nu < D; ++nu)
    for (int mu = 0; mu < D; ++mu) {
      double acc = 0;
      for (int eta = 0; eta < D; ++eta)
        for (int s = 0; s < D; ++s) acc += up[nu][eta][s] * dg(mu, eta, s);
      w[nu][mu] = acc;
    }
  PointMetric H(D);
  for (int mu = 0; mu < D; ++mu)
    for (int nu = mu; nu < D; ++nu) {
      double quad = 0;
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          const double gab = g_inv(a, b);
          if (gab == 0.0) continue;
          double inner = 0;
          for (int e = 0; e < D; ++e) inner += low[e][mu][b] * G[e][nu][a];
          quad += gab * inner;
        }
      double transport = 0;
      for (int a = 0; a < D; ++a) transport += dg(a, mu, nu) * gamma.contracted[a];
      H.set(mu, nu, quad + 0.5 * (transport + w[nu][mu] + w[mu][nu]));
    }
  return H;
}

SignatureInfo signature(const PointMetric& g, double zero_tol) {
  const int D = g.dim();
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) m(i, j) = g(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.topLeftCorner(D, D));
  SignatureInfo info;
  info.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < D; ++i) {
    const double lam = es.eigenvalues()(i);
    info.margin = std::min(info.margin, std::abs(lam));
    if (lam < -zero_tol)
      ++info.negative;
    else if (lam > zero_tol)
      ++info.positive;
    else
      info.degenerate = true;
  }
  if (info.degenerate) info.margin = 0.0;
  return info;
}

long unknown_count(int n) {
  if (n < 1) throw Error(ErrorKind::configuration, "unknown_count needs n >= 1");
  const long a = n + 1;
  const long b = n + 2;
  return a * b * b / 2;
}

}  // namespace nslab
