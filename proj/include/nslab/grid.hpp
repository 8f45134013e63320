#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nslab {

// Periodic box [-L, L)^n sampled with N points per axis, axis 0 slowest in memory.
struct GridSpec {
  int n = 2;
  int N = 64;
  double L = 1.0;
  bool offset_origin = true;

  double spacing() const { return 2.0 * L / N; }
  std::size_t size() const;
  double coordinate(int i) const { return -L + (i + (offset_origin ? 0.5 : 0.0)) * spacing(); }
  std::array<int, 3> index(std::size_t flat) const;
  std::size_t flat(const std::array<int, 3>& idx) const;
  std::array<double, 3> point(std::size_t flat) const;
  // Flat index of the point shifted by `shift` cells along `axis`, with wrap-around.
  std::size_t neighbour(std::size_t flat, int axis, int shift) const;
  // Wrap-around displacement i*h or (i-N)*h per axis, the layout of sampled kernels.
  std::array<double, 3> displacement(std::size_t flat) const;

  bool operator==(const GridSpec&) const = default;
};

GridSpec make_grid(int n, int N, double L, bool offset_origin);

class ScalarGridField {
 public:
  ScalarGridField() = default;
  explicit ScalarGridField(const GridSpec& grid, double fill = 0.0);
  ScalarGridField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Fields allowed to carry non-finite values (curvature probes at the singular point).
  bool blow_up() const { return blow_up_; }
  void set_blow_up(bool flag) { blow_up_ = flag; }
  bool all_finite() const;

  double sup_norm() const;
  double sup_norm(const std::function<bool(std::size_t)>& include) const;

  ScalarGridField& operator+=(const ScalarGridField& other);
  ScalarGridField& operator-=(const ScalarGridField& other);
  ScalarGridField& operator*=(double a);

 private:
  GridSpec grid_{};
  std::vector<double> values_;
  bool blow_up_ = false;
};

ScalarGridField operator+(ScalarGridField a, const ScalarGridField& b);
ScalarGridField operator-(ScalarGridField a, const ScalarGridField& b);
ScalarGridField operator*(double a, ScalarGridField f);

template <class Fn>
ScalarGridField sample(const GridSpec& grid, Fn&& fn) {
  ScalarGridField f(grid);
  for (std::size_t p = 0; p < grid.size(); ++p) f[p] = fn(grid.point(p));
  return f;
}

struct TimeGrid {
  double T = 0.1;
  int M = 16;

  double dt() const { return T / M; }
  double time(int j) const { return j * dt(); }
  // Number of stored slices t_0 = 0, ..., t_M = T.
  int slices() const { return M + 1; }
};

TimeGrid make_time_grid(double T, int M);

// Region removed from diagnostics around the singular set.
struct ExclusionRegion {
  enum class Shape { none, ball, slab };
  Shape shape = Shape::none;
  double radius = 0.0;
  int axis = 0;  // slab normal

  bool excludes(const GridSpec& grid, std::size_t flat) const;
  double distance(const GridSpec& grid, std::size_t flat) const;
  std::function<bool(std::size_t)> keep(const GridSpec& grid) const;
};

enum class DerivativeBackend { spectral, fd4 };

ScalarGridField spatial_derivative(const ScalarGridField& f, int axis);
ScalarGridField spatial_derivative(const ScalarGridField& f, int axis, DerivativeBackend backend);
ScalarGridField spatial_derivative_fd4(const ScalarGridField& f, int axis);

double discrete_l2_norm(const ScalarGridField& f);
double sobolev_norm(const ScalarGridField& f, double s);

struct HolderOptions {
  int stencil_radius = 3;
  DerivativeBackend backend = DerivativeBackend::spectral;
  std::function<bool(std::size_t)> include;  // empty: whole grid
};

double holder_norm_proxy(const ScalarGridField& f, double delta, const HolderOptions& options = {});

}  // namespace nslab
