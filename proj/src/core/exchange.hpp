#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/cable.hpp"
#include "core/circuit.hpp"
#include "core/network.hpp"

namespace kljn {

/// A party's resistor choice for one bit-exchange period.
enum class BitChoice { Low, High };

/// What a party inferred about the far end.  Undecided marks a
/// measurement that fell between decision thresholds or contradicted the
/// party's own choice; it counts as an error.
enum class DecodeOutcome { Low, High, Undecided };

/// Full protocol configuration.  Defaults follow the illustrative
/// choices documented in the README: R_L=1 kOhm, R_H=10 kOhm,
/// T_eff=1e15 K, f_c=5 kHz, bit_period=2000/f_c on the preset cable.
struct KljnConfig {
  double r_low = 1e3;               // R_L [Ohm]
  double r_high = 1e4;              // R_H [Ohm]
  double noise_temperature = 1e15;  // T_eff [K]
  double noise_cutoff = 5e3;        // f_c [Hz]
  CableSpec cable{0.25e-6, 100.0e-12, 0.021, 1.5};
  double bit_period = 0.4;          // [s]
  double sample_rate = 1e5;         // [Hz]
  std::uint64_t rng_seed = 42;
  int bit_count = 1000;
};

/// Outcome of a single bit-exchange period.
struct BitExchange {
  BitChoice alice_choice = BitChoice::Low;
  BitChoice bob_choice = BitChoice::Low;
  DecodeOutcome alice_decoded_bob = DecodeOutcome::Undecided;
  DecodeOutcome bob_decoded_alice = DecodeOutcome::Undecided;
  bool secure = false;              // choices differ (HL or LH)
  double mean_square_voltage = 0.0; // Alice-end node voltage [V^2]
  double mean_square_current = 0.0; // loop current [A^2]
};

/// Aggregate of a full protocol run.  The delay pair is measured by the
/// tone probe in the mixed configuration R_A = r_high, R_B = r_low.
struct ExchangeReport {
  std::vector<BitExchange> exchanges;
  double legit_error_rate = 0.0;  // wrong or undecided decodes / (2 * bits)
  double secure_fraction = 0.0;   // mixed-state bits / bits
  double eve_hl_lh_pvalue = 1.0;  // Welch test across the two secure states
  double eve_ll_hh_pvalue = 1.0;  // same test across the insecure states
  double delay_toward_bob = 0.0;  // [s]
  double delay_toward_alice = 0.0;
};

/// Expected Eve-visible mean-square voltage levels 4 k T_eff R_par f_c
/// for the three distinct parallel combinations of the loop.
struct DecodeLevels {
  double level_low_low = 0.0;
  double level_mixed = 0.0;
  double level_high_high = 0.0;
};

/// Throws ValidationError naming the offending field.  Enforced here:
/// distinct positive resistors, f_c <= 0.01 * f_min of the cable, and
/// sample_rate >= 20 * f_c.
void validate_config(const KljnConfig& config);

/// Parses a KljnConfig from JSON.  Recognized keys mirror the struct
/// (r_low, r_high, noise_temperature, noise_cutoff, bit_period,
/// sample_rate, rng_seed, bit_count) plus a nested "cable" object with
/// l_per_m/c_per_m/r_per_m/length_m.  Missing keys keep their defaults.
KljnConfig config_from_json(const std::string& json_text);

DecodeLevels decode_levels(const KljnConfig& config);

/// Simulates one bit period: both parties' band-limited noise generators
/// drive the pi-RLC loop.  Deterministic in (rng_seed, bit_index).
LoopTraces simulate_bit_period(const KljnConfig& config, BitChoice alice, BitChoice bob,
                               std::uint64_t bit_index = 0);

/// Classifies a measured mean-square node voltage against the three
/// expected levels (thresholds at geometric means of adjacent levels)
/// and resolves the far end's choice from the classifier's own.
DecodeOutcome decode_bit(BitChoice own_choice, double own_resistance,
                         const KljnConfig& config, double measured_mean_square_voltage);

/// Eve's estimate of the loop resistance sum from the current trace:
/// R_A + R_B = 4 k T_eff f_c / <I^2>.  HL and LH give the same expected
/// value, which is what keeps the secure states indistinguishable.
double eve_loop_statistic(const LoopTraces& traces, const KljnConfig& config);

/// Injects a single tone at the driven end of the mixed loop
/// (R_A = r_high, R_B = r_low), lets it settle for 10 periods, fits the
/// two node tones, and converts the phase lag to a delay
/// tau = |phase| / (2 pi f).  Passing probe_frequency = 0 selects
/// min(noise_cutoff, sample_rate/100).  Matches L_c/R_far within 5%.
double delay_probe(const KljnConfig& config, Direction direction,
                   double probe_frequency = 0.0);

/// Runs the full protocol: random per-bit choices, decoding, Eve's
/// statistics, and both delay probes.  Deterministic under a fixed seed.
ExchangeReport run_exchange(const KljnConfig& config);

} // namespace kljn
