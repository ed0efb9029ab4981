#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kljn {

/// Forward real-to-complex FFT, unnormalized.  Returns n/2 + 1 bins;
/// bin k corresponds to frequency k * sample_rate / n.
std::vector<std::complex<double>> real_fft(std::span<const double> x);

/// Inverse of `real_fft` including the 1/n factor, so that
/// real_ifft(real_fft(x), x.size()) reproduces x to rounding.
std::vector<double> real_ifft(std::span<const std::complex<double>> half_spectrum,
                              std::size_t n);

/// Unnormalized complex-to-real transform:
///   y[j] = Re(X[0]) + 2 * sum_{k=1}^{n/2-1} Re(X[k] exp(2 pi i j k / n)) + Nyquist term.
/// Useful for spectral synthesis where the caller owns the scaling.
std::vector<double> real_ifft_unnormalized(std::span<const std::complex<double>> half_spectrum,
                                           std::size_t n);

} // namespace kljn
