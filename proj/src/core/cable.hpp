#pragma once

#include <complex>
#include <string>
#include <vector>

namespace kljn {

/// Distributed description of a two-conductor transmission line.
/// All quantities are SI (H/m, F/m, Ohm/m, m).
struct CableSpec {
  double inductance_per_meter = 0.0;
  double capacitance_per_meter = 0.0;
  double resistance_per_meter = 0.0;
  double length = 0.0;
};

/// Constants derived from a CableSpec.  The `total_*` values are the
/// lumped (quasi-static) aggregates; the wave quantities describe the
/// lossless propagation problem on the same line.
struct CableDerived {
  double total_inductance = 0.0;   // L_c = L' * D   [H]
  double total_capacitance = 0.0;  // C_c = C' * D   [F]
  double total_resistance = 0.0;   // R_c = R' * D   [Ohm]
  double wave_velocity = 0.0;      // v_c = 1/sqrt(L'C')   [m/s]
  double wave_impedance = 0.0;     // R_w = sqrt(L'/C')    [Ohm]
  double min_wave_frequency = 0.0; // f_min = v_c/(2D), first standing-wave mode
};

/// Result of testing a frequency against the quasi-static (no-wave) band.
struct QuasiStaticVerdict {
  bool admissible = false; // frequency sits below margin * f_min
  double ratio = 0.0;      // f / min_wave_frequency
  double min_wave_frequency = 0.0;
};

/// Validates a CableSpec and computes derived quantities.
/// Throws ValidationError unless L' > 0, C' > 0, R' >= 0, length > 0
/// and every field is finite.
CableDerived derive(const CableSpec& spec);

/// Checks that `frequency` is deep inside the quasi-static band,
/// i.e. f <= margin * f_min.  `margin` must lie in (0, 1); the default
/// 0.01 keeps phase-velocity results frequency-flat to five digits.
QuasiStaticVerdict quasi_static_verdict(const CableSpec& spec, double frequency,
                                        double margin = 0.01);

/// Standing-wave mode frequencies f_n = n * v_c/(2D) for n = 1..n_max.
/// Everything below f_1 is a forbidden band of wave states.
std::vector<double> mode_frequencies(const CableSpec& spec, int n_max);

/// Series impedance of the lumped cable at `frequency`:
/// j*w*L_c when `include_loss` is false, R_c + j*w*L_c otherwise.
std::complex<double> cable_series_impedance(const CableSpec& spec, double frequency,
                                            bool include_loss);

/// Parses a cable from a JSON object with keys
/// l_per_m, c_per_m, r_per_m, length_m.  Throws ValidationError on
/// missing keys, wrong types or values that fail `derive`.
CableSpec cable_from_json(const std::string& json_text);

/// Named presets for the worked examples.  Currently only "rg58-1m5",
/// a 1.5 m RG58-class coax (0.25 uH/m, 100 pF/m, 21 mOhm/m).
CableSpec preset_cable(const std::string& name);

} // namespace kljn
