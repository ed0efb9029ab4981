#include "core/wave.hpp"

#include <cmath>
#include <limits>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace kljn {

namespace {

using cdbl = std::complex<double>;

const CableDerived& lossless_derived(const CableSpec& cable, CableDerived& storage) {
  storage = derive(cable);
  if (cable.resistance_per_meter != 0.0)
    throw ValidationError("wave oracle is defined for lossless cables only (R' = 0)");
  return storage;
}

} // namespace

LineTwoPort line_two_port(const CableSpec& cable, double frequency) {
  if (!(std::isfinite(frequency) && frequency > 0.0))
    throw ValidationError("frequency must be finite and > 0");
  CableDerived d;
  lossless_derived(cable, d);

  LineTwoPort line;
  line.frequency = frequency;
  line.electrical_length =
      2.0 * constants::pi * frequency * cable.length / d.wave_velocity;
  const double c = std::cos(line.electrical_length);
  const double s = std::sin(line.electrical_length);
  line.chain_matrix = {cdbl(c, 0.0), cdbl(0.0, d.wave_impedance * s),
                       cdbl(0.0, s / d.wave_impedance), cdbl(c, 0.0)};
  return line;
}

std::complex<double> input_impedance(const CableSpec& cable, double load, double frequency) {
  if (std::isnan(load) || load < 0.0)
    throw ValidationError("load must be >= 0 (infinity for an open line)");
  const LineTwoPort line = line_two_port(cable, frequency);
  const TwoPort& m = line.chain_matrix;
  if (std::isinf(load)) return m.a / m.c; // open-ended limit
  return (m.a * load + m.b) / (m.c * load + m.d);
}

std::complex<double> exact_transfer(const CableSpec& cable, const Termination& term,
                                    double frequency) {
  if (!(std::isfinite(term.resistance_alice) && term.resistance_alice > 0.0) ||
      !(std::isfinite(term.resistance_bob) && term.resistance_bob > 0.0))
    throw ValidationError("terminations must be finite and > 0");
  const LineTwoPort line = line_two_port(cable, frequency);
  const TwoPort& m = line.chain_matrix;
  // V_near = A V_far + B I_far with I_far = V_far / R_load; A = D makes
  // the expression the same from either end.
  const double r_load =
      term.drive_end == End::Alice ? term.resistance_bob : term.resistance_alice;
  return 1.0 / (m.a + m.b / r_load);
}

double dalembert_field(const std::function<double(double)>& u_plus,
                       const std::function<double(double)>& u_minus,
                       double position, double time, double velocity) {
  if (!(std::isfinite(velocity) && velocity > 0.0))
    throw ValidationError("wave velocity must be finite and > 0");
  if (!u_plus || !u_minus) throw ValidationError("both waveforms must be callable");
  return u_plus(time - position / velocity) + u_minus(time + position / velocity);
}

ForbiddenBandReport forbidden_band_report(const CableSpec& cable, double cutoff) {
  if (!(std::isfinite(cutoff) && cutoff > 0.0))
    throw ValidationError("cutoff must be finite and > 0");
  const CableDerived d = derive(cable);
  ForbiddenBandReport r;
  r.cutoff = cutoff;
  r.min_wave_frequency = d.min_wave_frequency;
  r.ratio = cutoff / d.min_wave_frequency;
  r.mode_count_below_cutoff = static_cast<int>(std::floor(r.ratio));
  return r;
}

std::vector<double> shorted_line_resonances(const CableSpec& cable, int n_max) {
  if (n_max < 1) throw ValidationError("resonance count must be >= 1");
  CableDerived d;
  lossless_derived(cable, d);

  auto im_zin_short = [&](double f) {
    return input_impedance(cable, 0.0, f).imag();
  };

  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    // Im(Z_in) = R_w tan(bD) crosses zero upward at bD = n pi; the
    // bracket stays clear of the poles at (n +- 1/2) pi.
    double lo = (n - 0.45) * d.min_wave_frequency;
    double hi = (n + 0.45) * d.min_wave_frequency;
    double flo = im_zin_short(lo);
    if (!(flo < 0.0 && im_zin_short(hi) > 0.0))
      throw NumericError("resonance bracket failed to straddle a sign change");
    while (hi - lo > 1e-9 * (0.5 * (hi + lo))) {
      const double mid = 0.5 * (lo + hi);
      const double fmid = im_zin_short(mid);
      if ((flo < 0.0) == (fmid < 0.0)) {
        lo = mid;
        flo = fmid;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

VelocityFit fit_single_velocity(double tau_toward_bob, double tau_toward_alice,
                                double length) {
  if (!(std::isfinite(tau_toward_bob) && tau_toward_bob > 0.0) ||
      !(std::isfinite(tau_toward_alice) && tau_toward_alice > 0.0))
    throw ValidationError("delays must be finite and > 0");
  if (!(std::isfinite(length) && length > 0.0))
    throw ValidationError("length must be finite and > 0");
  // One velocity predicts the same delay both ways; the minimax choice
  // is the midpoint, leaving half the gap as irreducible misfit.
  const double tau = 0.5 * (tau_toward_bob + tau_toward_alice);
  return {length / tau, 0.5 * std::abs(tau_toward_bob - tau_toward_alice)};
}

} // namespace kljn
