#include "core/spectral.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "core/errors.hpp"

namespace kljn {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  void* p = nullptr;
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
    if (!p) throw NumericError("fftw_malloc failed");
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

} // namespace

std::vector<std::complex<double>> real_fft(std::span<const double> x) {
  if (x.size() < 2) throw ValidationError("real_fft needs at least 2 samples");
  const std::size_t n = x.size();
  const std::size_t bins = n / 2 + 1;

  FftwBuffer in(sizeof(double) * n);
  FftwBuffer out(sizeof(fftw_complex) * bins);
  auto* din = static_cast<double*>(in.p);
  auto* dout = static_cast<fftw_complex*>(out.p);
  std::copy(x.begin(), x.end(), din);

  fftw_plan plan;
  {
    std::scoped_lock lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), din, dout, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("fftw r2c planning failed");
  fftw_execute(plan);
  {
    std::scoped_lock lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  std::vector<std::complex<double>> spectrum(bins);
  for (std::size_t k = 0; k < bins; ++k)
    spectrum[k] = {dout[k][0], dout[k][1]};
  return spectrum;
}

std::vector<double> real_ifft_unnormalized(std::span<const std::complex<double>> half_spectrum,
                                           std::size_t n) {
  if (n < 2) throw ValidationError("real_ifft needs at least 2 output samples");
  const std::size_t bins = n / 2 + 1;
  if (half_spectrum.size() != bins)
    throw ValidationError("half spectrum size must be n/2 + 1");

  FftwBuffer in(sizeof(fftw_complex) * bins);
  FftwBuffer out(sizeof(double) * n);
  auto* din = static_cast<fftw_complex*>(in.p);
  auto* dout = static_cast<double*>(out.p);
  for (std::size_t k = 0; k < bins; ++k) {
    din[k][0] = half_spectrum[k].real();
    din[k][1] = half_spectrum[k].imag();
  }

  fftw_plan plan;
  {
    std::scoped_lock lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), din, dout, FFTW_ESTIMATE);
  }
  if (!plan) throw NumericError("fftw c2r planning failed");
  fftw_execute(plan);
  {
    std::scoped_lock lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  return std::vector<double>(dout, dout + n);
}

std::vector<double> real_ifft(std::span<const std::complex<double>> half_spectrum,
                              std::size_t n) {
  std::vector<double> y = real_ifft_unnormalized(half_spectrum, n);
  const double scale = 1.0 / static_cast<double>(n);
  for (double& v : y) v *= scale;
  return y;
}

} // namespace kljn
