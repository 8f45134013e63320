#include "nslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "nslab/error.hpp"

namespace nslab {

ScalarGridField scalar_curvature(const SliceFields& fields, const std::vector<ScalarGridField>& dt_h,
                                 const std::vector<ScalarGridField>& dt_dg, double eps_det) {
  const GridSpec& grid = fields.grid();
  const int n = grid.n;
  const int D = n + 1;
  const int comps = sym_count(D);
  if (static_cast<int>(dt_h.size()) != comps || static_cast<int>(dt_dg.size()) != n * comps)
    throw Error(ErrorKind::shape, "time derivatives do not match the slice components");
  // spatial[sym(i,j) over spatial axes][c] = d_i d_j g_c, symmetrized from the carried g_{,k}
  std::vector<std::vector<ScalarGridField>> spatial(sym_count(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto& out = spatial[sym_index(i, j, n)];
      for (int c = 0; c < comps; ++c) {
        ScalarGridField a = spatial_derivative(fields.dgk(j, c), i);
        if (i != j) {
          a += spatial_derivative(fields.dgk(i, c), j);
          a *= 0.5;
        }
        out.push_back(std::move(a));
      }
    }
  ScalarGridField R(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const PointMetric g = fields.metric_at(p);
    const PointMetric gi = invert_metric(g, eps_det, p);
    const MetricDerivatives dg = fields.derivatives_at(p);
    MetricSecondDerivatives ddg;
    ddg.dim = D;
    for (int c = 0; c < comps; ++c) {
      ddg.d[0][0][c] = dt_h[c][p];
      for (int j = 0; j < n; ++j) {
        const double mixed = dt_dg[static_cast<std::size_t>(j * comps + c)][p];
        ddg.d[0][j + 1][c] = mixed;
        ddg.d[j + 1][0][c] = mixed;
        for (int i = 0; i < n; ++i) ddg.d[i + 1][j + 1][c] = spatial[sym_index(i, j, n)][c][p];
      }
    }
    const ChristoffelPoint gamma = christoffel(gi, dg);
    const ChristoffelDerivatives dgamma = christoffel_derivatives(gi, gamma, dg, ddg);
    R[p] = ricci_point(gi, gamma, dgamma).scalar;
  }
  if (!R.all_finite()) R.set_blow_up(true);
  return R;
}

CurvatureHistory curvature_history(const History& fields, const ExclusionRegion& exclusion, double eps_det) {
  fields.validate();
  const int slices = fields.time.slices();
  if (slices < 3) throw Error(ErrorKind::stencil, "curvature history needs at least 3 time slices");
  const double dt = fields.time.dt();
  const GridSpec& grid = fields.grid;
  const auto keep = exclusion.keep(grid);
  CurvatureHistory out;
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (exclusion.excludes(grid, p)) out.flagged.push_back(p);

  auto difference = [&](int j, auto family, std::size_t c) {
    const auto& s = fields.slices;
    ScalarGridField d(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      auto v = [&](int jj) { return (s[jj].*family)[c][p]; };
      if (j == 0)
        d[p] = (-3 * v(0) + 4 * v(1) - v(2)) / (2 * dt);
      else if (j == slices - 1)
        d[p] = (3 * v(j) - 4 * v(j - 1) + v(j - 2)) / (2 * dt);
      else
        d[p] = (v(j + 1) - v(j - 1)) / (2 * dt);
    }
    return d;
  };

  for (int j = 0; j < slices; ++j) {
    const SliceFields& s = fields.slices[j];
    std::vector<ScalarGridField> dth;
    std::vector<ScalarGridField> dtdg;
    for (std::size_t c = 0; c < s.h.size(); ++c) dth.push_back(difference(j, &SliceFields::h, c));
    for (std::size_t c = 0; c < s.dg.size(); ++c) dtdg.push_back(difference(j, &SliceFields::dg, c));
    ScalarGridField R = scalar_curvature(s, dth, dtdg, eps_det);
    out.times.push_back(fields.time.time(j));
    out.sup_outside.push_back(R.sup_norm(keep));
    out.scalar.push_back(std::move(R));
  }
  return out;
}

ScalarGridField data_slice_curvature(const DataList& data, Prefactor prefactor, double eps_det) {
  const SliceFields& s = data.fields;
  const auto dth = harmonic_rate(s, prefactor, eps_det);
  std::vector<ScalarGridField> dtdg;
  for (int k = 0; k < s.grid().n; ++k)
    for (const auto& hc : s.h) dtdg.push_back(spatial_derivative(hc, k));
  return scalar_curvature(s, dth, dtdg, eps_det);
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
  if (count < 2 || !(r_min > 0) || !(r_max > r_min)) throw Error(ErrorKind::configuration, "invalid radius range");
  std::vector<double> r;
  for (int i = 0; i < count; ++i) r.push_back(r_max * std::pow(r_min / r_max, static_cast<double>(i) / (count - 1)));
  return r;
}

BlowupFit fit_blowup_exponent(const ScalarGridField& slice, SingularGeometry geometry, const std::vector<double>& radii,
                              double shell_ratio, int axis) {
  const GridSpec& grid = slice.grid();
  if (radii.size() < 4) throw Error(ErrorKind::fit, "at least 4 radii required");
  if (!(shell_ratio > 1)) throw Error(ErrorKind::fit, "shell ratio must exceed 1");
  std::vector<double> r = radii;
  std::sort(r.begin(), r.end(), std::greater<>());
  if (r.front() / r.back() < 10.0 - 1e-9) throw Error(ErrorKind::fit, "radii must span at least one decade");
  if (r.back() < 2 * grid.spacing()) throw Error(ErrorKind::fit, "radii must be at least 2h");

  ExclusionRegion metric;
  metric.shape = geometry == SingularGeometry::point ? ExclusionRegion::Shape::ball : ExclusionRegion::Shape::slab;
  metric.axis = axis;
  std::vector<double> maxima(r.size(), -1.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double d = metric.distance(grid, p);
    const double v = std::abs(slice[p]);
    for (std::size_t m = 0; m < r.size(); ++m)
      if (d >= r[m] && d < shell_ratio * r[m]) maxima[m] = std::max(maxima[m], v);
  }
  BlowupFit fit;
  fit.shell_ratio = shell_ratio;
  for (std::size_t m = 0; m < r.size(); ++m) {
    if (maxima[m] > kBlowupNoiseFloor && std::isfinite(maxima[m])) {
      fit.radii.push_back(r[m]);
      fit.maxima.push_back(maxima[m]);
    }
  }
  if (fit.radii.size() < 4)
    throw Error(ErrorKind::fit, "only " + std::to_string(fit.radii.size()) + " radii have maxima above the noise floor");
  const std::size_t k = fit.radii.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t m = 0; m < k; ++m) {
    const double x = std::log(fit.radii[m]);
    const double y = std::log(fit.maxima[m]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double beta = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - beta * sx) / k;
  double ss = 0;
  for (std::size_t m = 0; m < k; ++m) {
    const double e = std::log(fit.maxima[m]) - (intercept + beta * std::log(fit.radii[m]));
    ss += e * e;
  }
  fit.beta = beta;
  fit.residual = std::sqrt(ss / k);
  return fit;
}

CurveSample make_curve(int dim, std::vector<double> s, std::vector<std::array<double, 4>> position) {
  if (s.size() < 2 || s.size() != position.size())
    throw Error(ErrorKind::configuration, "a curve needs at least 2 samples with matching positions");
  CurveSample c;
  c.dim = dim;
  c.s = std::move(s);
  c.position = std::move(position);
  const std::size_t m = c.s.size();
  c.tangent.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (int a = 0; a < dim; ++a) {
      if (m == 2) {
        c.tangent[j][a] = (c.position[1][a] - c.position[0][a]) / (c.s[1] - c.s[0]);
        continue;
      }
      // three-point Lagrange derivative on a non-uniform stencil
      const std::size_t i0 = j == 0 ? 0 : (j == m - 1 ? m - 3 : j - 1);
      const double x0 = c.s[i0], x1 = c.s[i0 + 1], x2 = c.s[i0 + 2], x = c.s[j];
      const double y0 = c.position[i0][a], y1 = c.position[i0 + 1][a], y2 = c.position[i0 + 2][a];
      c.tangent[j][a] = y0 * (2 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
                        y1 * (2 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
                        y2 * (2 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
    }
  }
  c.frame.resize(m);
  for (auto& f : c.frame)
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 4; ++a) f[i][a] = i == a ? 1.0 : 0.0;
  return c;
}

void validate(const CurveSample& curve) {
  for (std::size_t j = 1; j < curve.s.size(); ++j)
    if (!(curve.s[j] > curve.s[j - 1])) throw Error(ErrorKind::configuration, "curve parameters must increase");
  for (const auto& f : curve.frame) {
    // |det F| from the Gram matrix F F^T
    PointMetric m(curve.dim);
    for (int i = 0; i < curve.dim; ++i)
      for (int j = i; j < curve.dim; ++j) {
        double s = 0;
        for (int a = 0; a < curve.dim; ++a) s += f[i][a] * f[j][a];
        m.set(i, j, s);
      }
    if (!(std::sqrt(std::abs(determinant(m))) > 1e-8)) throw Error(ErrorKind::configuration, "curve frame is degenerate");
  }
}

PointMetric interpolate_metric(const History& fields, const std::array<double, 4>& position) {
  const GridSpec& grid = fields.grid;
  const int n = grid.n;
  const int D = n + 1;
  const double t = position[0];
  const double T = fields.time.T;
  if (t < -1e-12 * T || t > T * (1 + 1e-12)) throw Error(ErrorKind::domain, "curve leaves the evolved time range");
  const double tj = std::clamp(t / fields.time.dt(), 0.0, static_cast<double>(fields.time.M));
  const int j0 = std::min(static_cast<int>(std::floor(tj)), fields.time.M - 1);
  const double wt = tj - j0;
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> w{0, 0, 0};
  const double h = grid.spacing();
  const double shift = grid.offset_origin ? 0.5 : 0.0;
  for (int a = 0; a < n; ++a) {
    const double x = position[a + 1];
    if (x < -grid.L || x > grid.L) throw Error(ErrorKind::domain, "curve leaves the spatial box");
    const double u = (x + grid.L) / h - shift;
    base[a] = static_cast<int>(std::floor(u));
    w[a] = u - base[a];
  }
  PointMetric out(D);
  const int comps = sym_count(D);
  for (int corner = 0; corner < (1 << n); ++corner) {
    std::array<int, 3> idx = base;
    double weight = 1;
    for (int a = 0; a < n; ++a) {
      const int bit = (corner >> a) & 1;
      idx[a] += bit;
      weight *= bit ? w[a] : 1 - w[a];
    }
    if (weight == 0) continue;
    const std::size_t p = grid.flat(idx);
    for (int c = 0; c < comps; ++c) {
      const double v = (1 - wt) * fields.slices[j0].g[c][p] + wt * fields.slices[j0 + 1].g[c][p];
      out.component(c) += weight * v;
    }
  }
  return out;
}

double gap_length(const CurveSample& curve, const History& metric_fields, GapConvention convention) {
  validate(curve);
  const int D = metric_fields.grid.n + 1;
  if (curve.dim != D) throw Error(ErrorKind::shape, "curve dimension does not match the space-time");
  std::vector<double> integrand(curve.s.size());
  for (std::size_t j = 0; j < curve.s.size(); ++j) {
    const PointMetric g = interpolate_metric(metric_fields, curve.position[j]);
    double sum = 0;
    double squares = 0;
    for (int i = 0; i < D; ++i) {
      double v = 0;
      for (int mu = 0; mu < D; ++mu)
        for (int nu = 0; nu < D; ++nu) v += g(mu, nu) * curve.tangent[j][mu] * curve.frame[j][i][nu];
      sum += v;
      squares += v * v;
    }
    integrand[j] = convention == GapConvention::as_written ? sum : std::sqrt(squares);
  }
  double length = 0;
  for (std::size_t j = 1; j < curve.s.size(); ++j)
    length += 0.5 * (integrand[j] + integrand[j - 1]) * (curve.s[j] - curve.s[j - 1]);
  return length;
}

ConstraintSeries constraint_monitor(const SliceFields& slice, const ExclusionRegion& exclusion, double eps_det) {
  const GridSpec& grid = slice.grid();
  const auto keep = exclusion.keep(grid);
  ConstraintSeries out;
  std::array<double, 4> sup{0, 0, 0, 0};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (keep && !keep(p)) continue;
    const PointMetric g = slice.metric_at(p);
    const ChristoffelPoint gamma = christoffel(invert_metric(g, eps_det, p), slice.derivatives_at(p));
    for (int mu = 0; mu < slice.dim(); ++mu) sup[mu] = std::max(sup[mu], std::abs(gamma.contracted[mu]));
  }
  out.times.push_back(0.0);
  out.sup.push_back(sup);
  out.max.push_back(*std::max_element(sup.begin(), sup.end()));
  out.initial = out.max.front();
  out.peak = out.initial;
  return out;
}

ConstraintSeries constraint_monitor(const History& fields, const ExclusionRegion& exclusion, double eps_det) {
  fields.validate();
  ConstraintSeries out;
  for (int j = 0; j < fields.time.slices(); ++j) {
    const ConstraintSeries one = constraint_monitor(fields.slices[j], exclusion, eps_det);
    out.times.push_back(fields.time.time(j));
    out.sup.push_back(one.sup.front());
    out.max.push_back(one.max.front());
  }
  out.initial = out.max.front();
  out.peak = *std::max_element(out.max.begin(), out.max.end());
  return out;
}

SignatureSeries signature_monitor(const History& fields) {
  fields.validate();
  SignatureSeries out;
  for (int j = 0; j < fields.time.slices(); ++j) {
    const double m = uniform_lorentz_margin(fields.slices[j]);
    out.times.push_back(fields.time.time(j));
    out.margin.push_back(m);
    if (m <= 0 && out.first_failure < 0) out.first_failure = j;
  }
  return out;
}

}  // namespace nslab
