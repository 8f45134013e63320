#include "nslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "nslab/error.hpp"
#include "nslab/fft.hpp"

namespace nslab {

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < n; ++a) s *= static_cast<std::size_t>(N);
  return s;
}

std::array<int, 3> GridSpec::index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = n - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % N);
    flat /= N;
  }
  return idx;
}

std::size_t GridSpec::flat(const std::array<int, 3>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < n; ++a) f = f * N + static_cast<std::size_t>(((idx[a] % N) + N) % N);
  return f;
}

std::array<double, 3> GridSpec::point(std::size_t flat_index) const {
  const auto idx = index(flat_index);
  std::array<double, 3> x{0, 0, 0};
  for (int a = 0; a < n; ++a) x[a] = coordinate(idx[a]);
  return x;
}

std::size_t GridSpec::neighbour(std::size_t flat_index, int axis, int shift) const {
  auto idx = index(flat_index);
  idx[axis] += shift;
  return flat(idx);
}

std::array<double, 3> GridSpec::displacement(std::size_t flat_index) const {
  const auto idx = index(flat_index);
  std::array<double, 3> y{0.0, 0.0, 0.0};
  for (int a = 0; a < n; ++a) y[a] = (idx[a] < N / 2 ? idx[a] : idx[a] - N) * spacing();
  return y;
}

GridSpec make_grid(int n, int N, double L, bool offset_origin) {
  if (n < 1 || n > 3) throw Error(ErrorKind::configuration, "grid dimension must be 1, 2 or 3");
  if (N < 16 || N % 2 != 0) throw Error(ErrorKind::configuration, "points per axis must be even and >= 16");
  if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::configuration, "box half-width must be positive");
  return GridSpec{n, N, L, offset_origin};
}

TimeGrid make_time_grid(double T, int M) {
  if (!(T > 0) || !std::isfinite(T)) throw Error(ErrorKind::configuration, "time horizon must be positive");
  if (M < 2) throw Error(ErrorKind::configuration, "time grid needs at least 2 steps");
  return TimeGrid{T, M};
}

ScalarGridField::ScalarGridField(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

ScalarGridField::ScalarGridField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorKind::shape, "field size does not match grid");
}

bool ScalarGridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double ScalarGridField::sup_norm() const {
  double m = 0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarGridField::sup_norm(const std::function<bool(std::size_t)>& include) const {
  if (!include) return sup_norm();
  double m = 0;
  for (std::size_t p = 0; p < values_.size(); ++p)
    if (include(p)) m = std::max(m, std::abs(values_[p]));
  return m;
}

ScalarGridField& ScalarGridField::operator+=(const ScalarGridField& other) {
  if (other.size() != size()) throw Error(ErrorKind::shape, "field size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarGridField& ScalarGridField::operator-=(const ScalarGridField& other) {
  if (other.size() != size()) throw Error(ErrorKind::shape, "field size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarGridField& ScalarGridField::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

ScalarGridField operator+(ScalarGridField a, const ScalarGridField& b) { return a += b; }
ScalarGridField operator-(ScalarGridField a, const ScalarGridField& b) { return a -= b; }
ScalarGridField operator*(double a, ScalarGridField f) { return f *= a; }

double ExclusionRegion::distance(const GridSpec& grid, std::size_t flat) const {
  const auto x = grid.point(flat);
  if (shape == Shape::slab) return std::abs(x[axis]);
  double r2 = 0;
  for (int a = 0; a < grid.n; ++a) r2 += x[a] * x[a];
  return std::sqrt(r2);
}

bool ExclusionRegion::excludes(const GridSpec& grid, std::size_t flat) const {
  if (shape == Shape::none) return false;
  return distance(grid, flat) < radius;
}

std::function<bool(std::size_t)> ExclusionRegion::keep(const GridSpec& grid) const {
  if (shape == Shape::none) return {};
  return [grid, region = *this](std::size_t p) { return !region.excludes(grid, p); };
}

ScalarGridField spatial_derivative(const ScalarGridField& f, int axis) {
  if (axis < 0 || axis >= f.grid().n) throw Error(ErrorKind::shape, "derivative axis out of range");
  return apply_multiplier(f, [axis](std::size_t i, const FourierTransform& ft) {
    if (ft.nyquist(i, axis)) return std::complex<double>(0, 0);
    return std::complex<double>(0, ft.wavevector(i)[axis]);
  });
}

ScalarGridField spatial_derivative_fd4(const ScalarGridField& f, int axis) {
  const auto& g = f.grid();
  if (axis < 0 || axis >= g.n) throw Error(ErrorKind::shape, "derivative axis out of range");
  const double inv = 1.0 / (12.0 * g.spacing());
  ScalarGridField out(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    out[p] = (-f[g.neighbour(p, axis, 2)] + 8 * f[g.neighbour(p, axis, 1)] - 8 * f[g.neighbour(p, axis, -1)] +
              f[g.neighbour(p, axis, -2)]) *
             inv;
  }
  return out;
}

ScalarGridField spatial_derivative(const ScalarGridField& f, int axis, DerivativeBackend backend) {
  return backend == DerivativeBackend::spectral ? spatial_derivative(f, axis) : spatial_derivative_fd4(f, axis);
}

double discrete_l2_norm(const ScalarGridField& f) {
  double s = 0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s * std::pow(f.grid().spacing(), f.grid().n));
}

double sobolev_norm(const ScalarGridField& f, double s) {
  if (s < 0) throw Error(ErrorKind::configuration, "Sobolev index must be non-negative");
  auto& ft = transform_for(f.grid());
  const Spectrum spec = ft.forward(f.values());
  double sum = 0;
  for (std::size_t i = 0; i < spec.size(); ++i)
    sum += ft.multiplicity(i) * std::pow(1.0 + ft.k_squared(i), s) * std::norm(spec[i]);
  const auto& g = f.grid();
  const double cell = std::pow(g.spacing(), g.n);
  return std::sqrt(sum * cell / static_cast<double>(g.size()));
}

double holder_norm_proxy(const ScalarGridField& f, double delta, const HolderOptions& options) {
  if (!(delta > 0 && delta <= 1)) throw Error(ErrorKind::configuration, "Hoelder exponent must lie in (0,1]");
  const auto& g = f.grid();
  std::vector<ScalarGridField> grad;
  for (int a = 0; a < g.n; ++a) grad.push_back(spatial_derivative(f, a, options.backend));
  auto included = [&](std::size_t p) { return !options.include || options.include(p); };

  double sup_f = 0;
  double sup_grad = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!included(p)) continue;
    sup_f = std::max(sup_f, std::abs(f[p]));
    double gn = 0;
    for (int a = 0; a < g.n; ++a) gn += grad[a][p] * grad[a][p];
    sup_grad = std::max(sup_grad, std::sqrt(gn));
  }

  // Half of the stencil offsets; the other half gives the same pairs.
  const int r = options.stencil_radius;
  std::vector<std::array<int, 3>> offsets;
  std::array<int, 3> o{0, 0, 0};
  const int span = 2 * r + 1;
  int total = 1;
  for (int a = 0; a < g.n; ++a) total *= span;
  for (int c = 0; c < total; ++c) {
    int rest = c;
    for (int a = g.n - 1; a >= 0; --a) {
      o[a] = rest % span - r;
      rest /= span;
    }
    bool positive = false;
    for (int a = 0; a < g.n; ++a) {
      if (o[a] != 0) {
        positive = o[a] > 0;
        break;
      }
    }
    if (positive) offsets.push_back(o);
  }

  double quotient = 0;
  const double h = g.spacing();
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!included(p)) continue;
    const auto idx = g.index(p);
    for (const auto& off : offsets) {
      std::array<int, 3> q_idx = idx;
      double dist2 = 0;
      for (int a = 0; a < g.n; ++a) {
        q_idx[a] += off[a];
        dist2 += off[a] * off[a];
      }
      const std::size_t q = g.flat(q_idx);
      if (!included(q)) continue;
      double diff2 = 0;
      for (int a = 0; a < g.n; ++a) {
        const double d = grad[a][p] - grad[a][q];
        diff2 += d * d;
      }
      quotient = std::max(quotient, std::sqrt(diff2) / std::pow(h * std::sqrt(dist2), delta));
    }
  }
  return sup_f + sup_grad + quotient;
}

}  // namespace nslab
