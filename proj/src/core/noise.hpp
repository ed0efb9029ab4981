#pragma once

#include <cstdint>
#include <vector>

namespace kljn {

/// Band-limited Johnson-noise voltage series for a resistor at an
/// effective noise temperature: flat one-sided density 4kTR on (0, f_c],
/// nothing above.  Synthesized spectrally (equal-amplitude bins, seeded
/// random phases), so the band edge is exact and the series is
/// bit-reproducible for a fixed seed.  The per-sample distribution is
/// Gaussian by the central limit theorem over the in-band bins.
std::vector<double> generate_band_limited_noise(double resistance, double temperature,
                                                double cutoff, double duration,
                                                double sample_rate, std::uint64_t seed);

/// Nominal mean-square voltage 4*k*T*R*f_c of the band-limited source.
double johnson_mean_square(double resistance, double temperature, double cutoff);

} // namespace kljn
