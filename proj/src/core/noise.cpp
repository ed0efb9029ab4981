#include "core/noise.hpp"

#include <cmath>
#include <complex>
#include <random>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/spectral.hpp"

namespace kljn {

namespace {

void check_positive(double value, const char* what) {
  if (!(std::isfinite(value) && value > 0.0))
    throw ValidationError(std::string(what) + " must be finite and > 0");
}

} // namespace

std::vector<double> generate_band_limited_noise(double resistance, double temperature,
                                                double cutoff, double duration,
                                                double sample_rate, std::uint64_t seed) {
  check_positive(resistance, "resistance");
  check_positive(temperature, "temperature");
  check_positive(cutoff, "cutoff");
  check_positive(duration, "duration");
  check_positive(sample_rate, "sample rate");
  if (cutoff > sample_rate / 2.0)
    throw ValidationError("cutoff must not exceed the Nyquist frequency");
  const double raw_count = duration * sample_rate;
  if (raw_count > 1e9)
    throw ValidationError("duration * sample_rate too large (> 1e9 samples)");

  const std::size_t n = static_cast<std::size_t>(std::llround(raw_count));
  if (n < 4) throw ValidationError("duration too short at this sample rate");
  const double df = sample_rate / static_cast<double>(n); // bin width = 1/duration
  const std::size_t in_band = static_cast<std::size_t>(std::floor(cutoff / df));
  if (in_band < 1)
    throw ValidationError("duration too short to host any in-band component");

  // One-sided density S0 = 4kTR; each bin carries mean square S0*df,
  // i.e. a cosine of amplitude a = sqrt(2*S0*df) and a random phase.
  const double s0 = 4.0 * constants::boltzmann * temperature * resistance;
  const double amplitude = std::sqrt(2.0 * s0 * df);

  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw keeps the phase stream identical across
  // standard library implementations.
  constexpr double two_pi_over_2_53 =
      2.0 * constants::pi / 9007199254740992.0;

  std::vector<std::complex<double>> half(n / 2 + 1, {0.0, 0.0});
  // The Nyquist bin cannot carry an arbitrary phase; stop just below it.
  const std::size_t top = std::min(in_band, n / 2 - 1);
  for (std::size_t k = 1; k <= top; ++k) {
    const double phase = static_cast<double>(rng() >> 11) * two_pi_over_2_53;
    // The unnormalized c2r transform contributes 2*Re(X_k e^{i...}),
    // so |X_k| = a/2 yields a cosine of amplitude a.
    half[k] = std::polar(amplitude / 2.0, phase);
  }
  return real_ifft_unnormalized(half, n);
}

double johnson_mean_square(double resistance, double temperature, double cutoff) {
  check_positive(resistance, "resistance");
  check_positive(temperature, "temperature");
  check_positive(cutoff, "cutoff");
  return 4.0 * constants::boltzmann * temperature * resistance * cutoff;
}

} // namespace kljn
