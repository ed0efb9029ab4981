#include "core/network.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/spectral.hpp"

namespace kljn {

namespace {

using cdbl = std::complex<double>;

void check_termination(const Termination& term) {
  if (!(std::isfinite(term.resistance_alice) && term.resistance_alice > 0.0))
    throw ValidationError("Alice termination must be finite and > 0");
  if (!(std::isfinite(term.resistance_bob) && term.resistance_bob > 0.0))
    throw ValidationError("Bob termination must be finite and > 0");
  if (!std::isfinite(term.drive_amplitude))
    throw ValidationError("drive amplitude must be finite");
}

void check_frequency(double f) {
  if (!(std::isfinite(f) && f > 0.0))
    throw ValidationError("frequency must be finite and > 0");
}

TwoPort chain_multiply(const TwoPort& m, const TwoPort& n) {
  return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
          m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

} // namespace

TwoPort cable_two_port(const NetworkModel& model, const CableSpec& cable, double frequency) {
  check_frequency(frequency);
  const CableDerived d = derive(cable);
  const double omega = 2.0 * constants::pi * frequency;
  const cdbl jwl(0.0, omega * d.total_inductance);
  const cdbl jwc(0.0, omega * d.total_capacitance);

  switch (model.topology) {
  case Topology::LosslessL:
    return {1.0, jwl, 0.0, 1.0};
  case Topology::LossyRL:
    return {1.0, d.total_resistance + jwl, 0.0, 1.0};
  case Topology::PiRLC: {
    const cdbl z = d.total_resistance + jwl;
    const cdbl y = jwc;
    return {1.0 + z * y / 2.0, z, y * (1.0 + z * y / 4.0), 1.0 + z * y / 2.0};
  }
  case Topology::LadderN: {
    if (model.segment_count < 1)
      throw ValidationError("ladder model needs at least one segment");
    const double n = model.segment_count;
    const TwoPort series{1.0, (d.total_resistance + jwl) / n, 0.0, 1.0};
    const TwoPort shunt{1.0, 0.0, jwc / n, 1.0};
    TwoPort acc{1.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < model.segment_count; ++i)
      acc = chain_multiply(acc, chain_multiply(series, shunt));
    return acc;
  }
  }
  throw ValidationError("unknown network topology");
}

PhasorSolution solve_phasor(const NetworkModel& model, const CableSpec& cable,
                            const Termination& term, double frequency) {
  check_termination(term);
  TwoPort m = cable_two_port(model, cable, frequency);

  const bool alice_drives = term.drive_end == End::Alice;
  if (!alice_drives)
    m = {m.d, m.b, m.c, m.a}; // reciprocal network seen from the other port

  const double r_source = alice_drives ? term.resistance_alice : term.resistance_bob;
  const double r_load = alice_drives ? term.resistance_bob : term.resistance_alice;

  // Generator U behind r_source at the near port, r_load across the far
  // port: V_near = A V_far + B I_far, I_near = C V_far + D I_far,
  // U = V_near + I_near r_source, I_far = V_far / r_load.
  const cdbl denom = (m.c + m.d / r_load) * r_source + m.a + m.b / r_load;
  const cdbl v_far = term.drive_amplitude / denom;
  const cdbl i_far = v_far / r_load;
  const cdbl v_near = m.a * v_far + m.b * i_far;
  const cdbl i_near = m.c * v_far + m.d * i_far;

  PhasorSolution s;
  s.frequency = frequency;
  s.voltage_alice_end = alice_drives ? v_near : v_far;
  s.voltage_bob_end = alice_drives ? v_far : v_near;
  s.loop_current = i_near;
  s.drop_u_ab = s.voltage_alice_end - s.voltage_bob_end;
  return s;
}

double phase_shift(const NetworkModel& model, const CableSpec& cable,
                   const Termination& term, double frequency, Direction direction) {
  Termination t = term;
  t.drive_end = direction == Direction::TowardBob ? End::Alice : End::Bob;
  t.drive_amplitude = 1.0;
  const PhasorSolution s = solve_phasor(model, cable, t, frequency);
  const cdbl v_far = direction == Direction::TowardBob ? s.voltage_bob_end : s.voltage_alice_end;
  const cdbl v_near = direction == Direction::TowardBob ? s.voltage_alice_end : s.voltage_bob_end;
  return std::arg(v_far / v_near);
}

double time_delay(const CableSpec& cable, const Termination& term, Direction direction) {
  check_termination(term);
  const CableDerived d = derive(cable);
  const double r_far =
      direction == Direction::TowardBob ? term.resistance_bob : term.resistance_alice;
  return d.total_inductance / r_far;
}

double equivalent_phase_velocity(const NetworkModel& model, const CableSpec& cable,
                                 const Termination& term, double frequency,
                                 Direction direction) {
  const double phase = phase_shift(model, cable, term, frequency, direction);
  if (std::abs(phase) < 1e-13)
    throw NumericError("phase lag too small to define an equivalent velocity");
  return 2.0 * constants::pi * frequency * cable.length / std::abs(phase);
}

std::vector<SweepRow> ac_sweep(const NetworkModel& model, const CableSpec& cable,
                               const Termination& term, double f_start, double f_stop,
                               int points_per_decade) {
  check_frequency(f_start);
  check_frequency(f_stop);
  if (!(f_start < f_stop)) throw ValidationError("sweep needs f_start < f_stop");
  if (points_per_decade < 1) throw ValidationError("sweep needs >= 1 point per decade");

  std::vector<double> freqs;
  const double step = 1.0 / points_per_decade;
  const double decades = std::log10(f_stop / f_start);
  const int count = static_cast<int>(std::floor(decades / step * (1.0 + 1e-12)));
  for (int i = 0; i <= count; ++i)
    freqs.push_back(f_start * std::pow(10.0, i * step));
  if (freqs.back() < f_stop * (1.0 - 1e-9)) freqs.push_back(f_stop);

  std::vector<SweepRow> rows;
  rows.reserve(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const PhasorSolution s = solve_phasor(model, cable, term, freqs[i]);
    SweepRow row;
    row.frequency = freqs[i];
    row.magnitude = std::abs(s.drop_u_ab);
    row.phase = std::arg(s.drop_u_ab / s.voltage_alice_end);
    if (i == 0) {
      row.phase_unwrapped = row.phase;
    } else {
      double d = row.phase - rows.back().phase;
      d -= 2.0 * constants::pi * std::round(d / (2.0 * constants::pi));
      row.phase_unwrapped = rows.back().phase_unwrapped + d;
    }
    rows.push_back(row);
  }
  return rows;
}

DerivativeCheck derivative_response_check(const CableSpec& cable, const Termination& term,
                                          std::span<const double> generator_waveform,
                                          double sample_interval) {
  check_termination(term);
  if (!(std::isfinite(sample_interval) && sample_interval > 0.0))
    throw ValidationError("sample interval must be finite and > 0");
  if (generator_waveform.size() < 16)
    throw ValidationError("waveform too short for a spectral check");

  const CableDerived d = derive(cable);
  const std::size_t n = generator_waveform.size();
  const double bin_hz = 1.0 / (sample_interval * static_cast<double>(n));
  const double r_sum = term.resistance_alice + term.resistance_bob;

  std::vector<cdbl> spectrum = real_fft(generator_waveform);

  double peak = 0.0;
  for (std::size_t k = 1; k < spectrum.size(); ++k)
    peak = std::max(peak, std::norm(spectrum[k]));
  std::size_t k_min = 0, k_max = 0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    if (std::norm(spectrum[k]) > 1e-10 * peak) {
      if (k_min == 0) k_min = k;
      k_max = k;
    }
  }

  DerivativeCheck out;
  if (k_min == 0) { // pure DC: an inductor drop is identically zero
    out.simulated_drop.assign(n, 0.0);
    out.reference_derivative.assign(n, 0.0);
    return out;
  }
  // Bin index k_min equals the number of periods the slowest component
  // completes inside the window.
  if (k_min < 10)
    throw ValidationError("waveform must span >= 10 periods of its slowest component");
  if (k_max * bin_hz > d.min_wave_frequency / 10.0)
    throw ValidationError("waveform has energy above f_min/10; not quasi-static");

  std::vector<cdbl> drop(spectrum.size()), deriv(spectrum.size());
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double omega = 2.0 * constants::pi * bin_hz * static_cast<double>(k);
    const cdbl z(0.0, omega * d.total_inductance);
    drop[k] = spectrum[k] * z / (r_sum + z);
    deriv[k] = spectrum[k] * cdbl(0.0, omega * d.total_inductance / r_sum);
  }
  out.simulated_drop = real_ifft(drop, n);
  out.reference_derivative = real_ifft(deriv, n);

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = out.simulated_drop[i] - out.reference_derivative[i];
    num += e * e;
    den += out.reference_derivative[i] * out.reference_derivative[i];
  }
  out.residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

} // namespace kljn
