#include "nslab/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nslab/error.hpp"

namespace nslab {

double KernelSpec::width() const { return std::sqrt(4 * nu0 * t); }

void validate(const KernelSpec& spec) {
  if (!(spec.nu0 > 0)) throw Error(ErrorKind::configuration, "viscosity must be positive");
  if (!(spec.t > 0)) throw Error(ErrorKind::configuration, "kernel time must be positive");
}

namespace {

// Image sum of exp(-x^2 / (4 nu t)) (or its x-derivative) at the wrap-around displacements of one axis,
// divided by the discrete mass of the undifferentiated sum.
std::vector<double> periodic_gaussian(int N, double L, double four_nu_t, bool derivative) {
  const double h = 2 * L / N;
  // exp(-r^2 / 4 nu t) < 1e-14 beyond r = reach
  const double reach = std::sqrt(four_nu_t * std::log(1e14));
  const int images = static_cast<int>(std::ceil((reach + L) / (2 * L)));
  std::vector<double> value(N, 0.0);
  std::vector<double> slope(N, 0.0);
  for (int i = 0; i < N; ++i) {
    const double y = (i < N / 2 ? i : i - N) * h;
    for (int m = -images; m <= images; ++m) {
      const double x = y + 2 * L * m;
      const double e = std::exp(-x * x / four_nu_t);
      value[i] += e;
      slope[i] += -2 * x / four_nu_t * e;
    }
  }
  double mass = 0;
  for (double v : value) mass += v * h;
  auto& out = derivative ? slope : value;
  for (double& v : out) v /= mass;
  return out;
}

ScalarGridField separable_kernel(const KernelSpec& spec, int derivative_axis) {
  validate(spec);
  const auto& g = spec.grid;
  const auto base = periodic_gaussian(g.N, g.L, 4 * spec.nu0 * spec.t, false);
  const auto slope =
      derivative_axis >= 0 ? periodic_gaussian(g.N, g.L, 4 * spec.nu0 * spec.t, true) : std::vector<double>{};
  GridSpec layout = g;
  layout.offset_origin = false;
  ScalarGridField k(layout);
  for (std::size_t p = 0; p < g.size(); ++p) {
    const auto idx = g.index(p);
    double v = 1;
    for (int a = 0; a < g.n; ++a) v *= (a == derivative_axis ? slope : base)[idx[a]];
    k[p] = v;
  }
  return k;
}

}  // namespace

ScalarGridField sample_kernel(const KernelSpec& spec) { return separable_kernel(spec, -1); }

ScalarGridField sample_kernel_derivative(const KernelSpec& spec, int axis) {
  if (axis < 0 || axis >= spec.grid.n) throw Error(ErrorKind::shape, "kernel derivative axis out of range");
  return separable_kernel(spec, axis);
}

ScalarGridField conv_spatial(const ScalarGridField& f, const ScalarGridField& kernel) {
  const auto& a = f.grid();
  const auto& b = kernel.grid();
  if (a.n != b.n || a.N != b.N || a.L != b.L) throw Error(ErrorKind::shape, "convolution grid mismatch");
  auto& ft = transform_for(a);
  Spectrum fs = ft.forward(f.values());
  const Spectrum ks = ft.forward(kernel.values());
  const double cell = std::pow(a.spacing(), a.n);
  for (std::size_t i = 0; i < fs.size(); ++i) fs[i] *= ks[i] * cell;
  ScalarGridField out(a);
  ft.inverse(fs, out.values());
  return out;
}

ScalarGridField heat_smooth(const ScalarGridField& f, double nu0, double t) {
  return apply_multiplier(f, [nu0, t](std::size_t i, const FourierTransform& ft) {
    return std::complex<double>(std::exp(-nu0 * ft.k_squared(i) * t), 0.0);
  });
}

DuhamelIntegrator::DuhamelIntegrator(const GridSpec& grid, const TimeGrid& time, double nu0, EndpointRule rule)
    : time_(time), rule_(rule), dt_(time.dt()) {
  if (!(nu0 > 0)) throw Error(ErrorKind::configuration, "viscosity must be positive");
  auto& ft = transform_for(grid);
  const std::size_t modes = ft.spectrum_size();
  step_.resize(modes);
  w_prev_.resize(modes);
  w_last_.resize(modes);
  for (std::size_t i = 0; i < modes; ++i) {
    const double lambda = nu0 * ft.k_squared(i);
    const double x = lambda * dt_;
    step_[i] = std::exp(-x);
    if (rule == EndpointRule::approximate_identity) {
      w_prev_[i] = 0.0;
      w_last_[i] = x > 0 ? dt_ * (-std::expm1(-x)) / x : dt_;
    } else if (x < 1e-3) {
      w_prev_[i] = dt_ * (0.5 - x / 3 + x * x / 8 - x * x * x / 30);
      w_last_[i] = dt_ * (0.5 - x / 6 + x * x / 24 - x * x * x / 120);
    } else {
      w_prev_[i] = dt_ * (1 - (1 + x) * std::exp(-x)) / (x * x);
      w_last_[i] = dt_ * (x + std::expm1(-x)) / (x * x);
    }
  }
  propagators_.resize(time.slices());
  for (int j = 0; j < time.slices(); ++j) {
    auto& p = propagators_[j];
    p.resize(modes);
    const double t = time.time(j);
    for (std::size_t i = 0; i < modes; ++i) p[i] = std::exp(-nu0 * ft.k_squared(i) * t);
  }
}

std::vector<Spectrum> DuhamelIntegrator::integrate(const std::vector<Spectrum>& sources) const {
  if (sources.empty()) throw Error(ErrorKind::history, "empty source history");
  const std::size_t modes = step_.size();
  const std::size_t slices = sources.size();
  for (const auto& s : sources)
    if (s.size() != modes) throw Error(ErrorKind::shape, "source spectrum size mismatch");
  std::vector<Spectrum> out(slices, Spectrum(modes, {0.0, 0.0}));
  const double half = 0.5 * dt_;
  for (std::size_t i = 0; i < modes; ++i) {
    const double E = step_[i];
    if (rule_ == EndpointRule::approximate_identity) {
      // trap = trapezoid integral up to t_{j-1}
      std::complex<double> trap{0.0, 0.0};
      for (std::size_t j = 1; j < slices; ++j) {
        out[j][i] = E * trap + w_last_[i] * sources[j][i];
        trap = E * trap + half * (E * sources[j - 1][i] + sources[j][i]);
      }
    } else {
      for (std::size_t j = 1; j < slices; ++j)
        out[j][i] = E * out[j - 1][i] + w_prev_[i] * sources[j - 1][i] + w_last_[i] * sources[j][i];
    }
  }
  return out;
}

ScalarGridField conv_spacetime(std::span<const ScalarGridField> history, const TimeGrid& time, int slice,
                               double nu0, EndpointRule rule) {
  if (slice < 0 || slice > time.M) throw Error(ErrorKind::history, "slice outside the time grid");
  if (static_cast<int>(history.size()) < slice + 1)
    throw Error(ErrorKind::history, "history does not cover s in [0, t]");
  const GridSpec grid = history.front().grid();
  auto& ft = transform_for(grid);
  std::vector<Spectrum> sources;
  for (int j = 0; j <= slice; ++j) sources.push_back(ft.forward(history[j].values()));
  DuhamelIntegrator duhamel(grid, time, nu0, rule);
  const auto out = duhamel.integrate(sources);
  ScalarGridField f(grid);
  ft.inverse(out[slice], f.values());
  return f;
}

double viscosity_constant() { return 2.0 / std::numbers::e; }

namespace {

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  x.resize(order);
  w.resize(order);
  for (int i = 0; i < order; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = 0.5 * (1 - z);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

// L1 norms over one periodic axis of the image-summed Gaussian and its derivative at time t,
// sampled with spacing fine enough to resolve the kernel.
std::pair<double, double> axis_l1(double nu0, double t, const GridSpec& grid) {
  const double four_nu_t = 4 * nu0 * t;
  const double sigma = std::sqrt(0.5 * four_nu_t);
  const double L = grid.L;
  const double span = std::min(L, 12 * sigma);
  const double dx = std::min(grid.spacing(), sigma / 400);
  const int count = std::max(2, static_cast<int>(std::ceil(2 * span / dx)));
  const double step = 2 * span / count;
  const double reach = std::sqrt(four_nu_t * std::log(1e14));
  const int images = static_cast<int>(std::ceil((reach + L) / (2 * L)));
  const double norm = 1.0 / std::sqrt(std::numbers::pi * four_nu_t);
  double l1 = 0;
  double l1d = 0;
  for (int i = 0; i < count; ++i) {
    const double y = -span + (i + 0.5) * step;
    double v = 0;
    double d = 0;
    for (int m = -images; m <= images; ++m) {
      const double x = y + 2 * L * m;
      const double e = norm * std::exp(-x * x / four_nu_t);
      v += e;
      d += -2 * x / four_nu_t * e;
    }
    l1 += std::abs(v) * step;
    l1d += std::abs(d) * step;
  }
  return {l1, l1d};
}

}  // namespace

UniformL1Table verify_uniform_l1(std::span<const double> nu_list, double T, const GridSpec& grid) {
  if (nu_list.empty()) throw Error(ErrorKind::configuration, "empty viscosity list");
  if (!(T > 0)) throw Error(ErrorKind::configuration, "time horizon must be positive");
  for (std::size_t i = 0; i < nu_list.size(); ++i) {
    if (!(nu_list[i] > 0)) throw Error(ErrorKind::configuration, "viscosities must be positive");
    if (i > 0 && !(nu_list[i] < nu_list[i - 1]))
      throw Error(ErrorKind::configuration, "viscosity list must be decreasing");
  }
  std::vector<double> u, w;
  gauss_legendre(48, u, w);
  UniformL1Table table;
  table.T = T;
  table.c_vis = viscosity_constant();

  // 1-Lipschitz periodic test function
  const ScalarGridField lip = sample(grid, [&](const std::array<double, 3>& x) {
    return grid.L / std::numbers::pi * std::sin(std::numbers::pi * x[0] / grid.L);
  });

  for (double nu : nu_list) {
    UniformL1Row row;
    row.nu0 = nu;
    // t = T u^2 removes the t^{-1/2} endpoint singularity of the derivative norm.
    for (std::size_t q = 0; q < u.size(); ++q) {
      const double t = T * u[q] * u[q];
      const double jac = 2 * T * u[q] * w[q];
      const auto [l1, l1d] = axis_l1(nu, t, grid);
      // Other axes contribute their unit mass.
      row.l1_kernel += jac * std::pow(l1, grid.n);
      row.l1_derivative += jac * l1d * std::pow(l1, grid.n - 1);
    }
    const KernelSpec spec{nu, grid, T};
    row.resolved = spec.resolved();
    row.lipschitz_sup = conv_spatial(lip, sample_kernel_derivative(spec, 0)).sup_norm();
    table.rows.push_back(row);
  }
  double lo = table.rows.front().l1_derivative;
  double hi = lo;
  for (const auto& r : table.rows) {
    lo = std::min(lo, r.l1_derivative);
    hi = std::max(hi, r.l1_derivative);
  }
  table.max_derivative = hi;
  table.spread = hi / lo - 1;
  table.within_ten_percent = table.spread <= 0.1;
  table.cap = 2 * table.rows.front().l1_derivative;
  table.below_cap = hi <= table.cap;
  table.lipschitz_bound_holds = std::all_of(table.rows.begin(), table.rows.end(), [&](const UniformL1Row& r) {
    return r.lipschitz_sup <= 4 * table.c_vis;
  });
  return table;
}

}  // namespace nslab
