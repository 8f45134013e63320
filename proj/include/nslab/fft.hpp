#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "nslab/grid.hpp"

namespace nslab {

using Spectrum = std::vector<std::complex<double>>;

// Real-to-complex transform of an n-dimensional periodic grid (FFTW, half spectrum on the last axis).
class FourierTransform {
 public:
  explicit FourierTransform(const GridSpec& grid);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const GridSpec& grid() const { return grid_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  void forward(std::span<const double> in, Spectrum& out);
  Spectrum forward(std::span<const double> in);
  // Normalized inverse: inverse(forward(f)) == f.
  void inverse(const Spectrum& in, std::span<double> out);
  std::vector<double> inverse(const Spectrum& in);

  // Physical wavevector k = pi*m/L of each spectral index.
  const std::array<double, 3>& wavevector(std::size_t i) const { return k_[i]; }
  double k_squared(std::size_t i) const { return k2_[i]; }
  // True when spectral index i sits on the Nyquist plane of `axis`.
  bool nyquist(std::size_t i, int axis) const { return (nyquist_[i] >> axis) & 1u; }
  // Multiplicity of index i in the full (two-sided) spectrum.
  double multiplicity(std::size_t i) const { return weight_[i]; }

 private:
  GridSpec grid_;
  std::size_t real_size_;
  std::size_t spectrum_size_;
  double* real_buf_ = nullptr;
  void* complex_buf_ = nullptr;
  void* plan_forward_ = nullptr;
  void* plan_inverse_ = nullptr;
  std::vector<std::array<double, 3>> k_;
  std::vector<double> k2_;
  std::vector<std::uint8_t> nyquist_;
  std::vector<double> weight_;
};

// Per-thread cached transform for a grid.
FourierTransform& transform_for(const GridSpec& grid);

// Applies a real multiplier m(k) in Fourier space.
template <class Multiplier>
ScalarGridField apply_multiplier(const ScalarGridField& f, Multiplier&& m) {
  auto& ft = transform_for(f.grid());
  Spectrum s = ft.forward(f.values());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= m(i, ft);
  ScalarGridField out(f.grid());
  ft.inverse(s, out.values());
  return out;
}

}  // namespace nslab
