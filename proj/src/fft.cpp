#include "nslab/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <numbers>
#include <tuple>

#include "nslab/error.hpp"

namespace nslab {

FourierTransform::FourierTransform(const GridSpec& grid) : grid_(grid) {
  const int n = grid.n;
  const int N = grid.N;
  real_size_ = grid.size();
  spectrum_size_ = real_size_ / N * (N / 2 + 1);
  real_buf_ = fftw_alloc_real(real_size_);
  auto* cbuf = fftw_alloc_complex(spectrum_size_);
  complex_buf_ = cbuf;
  if (!real_buf_ || !cbuf) throw Error(ErrorKind::configuration, "FFT buffer allocation failed");
  std::array<int, 3> dims{N, N, N};
  plan_forward_ = fftw_plan_dft_r2c(n, dims.data(), real_buf_, cbuf, FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_c2r(n, dims.data(), cbuf, real_buf_, FFTW_ESTIMATE);

  const double scale = std::numbers::pi / grid.L;
  const int half = N / 2 + 1;
  k_.resize(spectrum_size_);
  k2_.resize(spectrum_size_);
  nyquist_.resize(spectrum_size_);
  weight_.resize(spectrum_size_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) {
    std::array<int, 3> m{0, 0, 0};
    std::size_t rest = i;
    m[n - 1] = static_cast<int>(rest % half);
    rest /= half;
    for (int a = n - 2; a >= 0; --a) {
      m[a] = static_cast<int>(rest % N);
      rest /= N;
    }
    std::array<double, 3> k{0, 0, 0};
    std::uint8_t nyq = 0;
    double k2 = 0;
    for (int a = 0; a < n; ++a) {
      const int signed_m = m[a] <= N / 2 ? m[a] : m[a] - N;
      k[a] = scale * signed_m;
      k2 += k[a] * k[a];
      if (m[a] == N / 2) nyq |= static_cast<std::uint8_t>(1u << a);
    }
    k_[i] = k;
    k2_[i] = k2;
    nyquist_[i] = nyq;
    const int last = m[n - 1];
    weight_[i] = (last == 0 || last == N / 2) ? 1.0 : 2.0;
  }
}

FourierTransform::~FourierTransform() {
  if (plan_forward_) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_inverse_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  fftw_free(real_buf_);
  fftw_free(complex_buf_);
}

void FourierTransform::forward(std::span<const double> in, Spectrum& out) {
  if (in.size() != real_size_) throw Error(ErrorKind::shape, "FFT input size mismatch");
  std::copy(in.begin(), in.end(), real_buf_);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  out.resize(spectrum_size_);
  std::memcpy(out.data(), complex_buf_, spectrum_size_ * sizeof(fftw_complex));
}

Spectrum FourierTransform::forward(std::span<const double> in) {
  Spectrum out;
  forward(in, out);
  return out;
}

void FourierTransform::inverse(const Spectrum& in, std::span<double> out) {
  if (in.size() != spectrum_size_ || out.size() != real_size_)
    throw Error(ErrorKind::shape, "inverse FFT size mismatch");
  std::memcpy(complex_buf_, in.data(), spectrum_size_ * sizeof(fftw_complex));
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));
  const double norm = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = real_buf_[i] * norm;
}

std::vector<double> FourierTransform::inverse(const Spectrum& in) {
  std::vector<double> out(real_size_);
  inverse(in, out);
  return out;
}

FourierTransform& transform_for(const GridSpec& grid) {
  thread_local std::map<std::tuple<int, int, double>, std::unique_ptr<FourierTransform>> cache;
  auto key = std::make_tuple(grid.n, grid.N, grid.L);
  auto it = cache.find(key);
  if (it == cache.end()) {
    GridSpec g = grid;
    g.offset_origin = false;
    it = cache.emplace(key, std::make_unique<FourierTransform>(g)).first;
  }
  return *it->second;
}

}  // namespace nslab
