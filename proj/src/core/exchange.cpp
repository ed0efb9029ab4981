#include "core/exchange.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include <json.hpp>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/noise.hpp"
#include "core/stats.hpp"

namespace kljn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent deterministic substream per (bit, channel).
std::uint64_t substream(std::uint64_t seed, std::uint64_t index, std::uint64_t channel) {
  return splitmix64(splitmix64(seed ^ splitmix64(index)) ^ (channel + 1));
}

double resistor_of(const KljnConfig& config, BitChoice choice) {
  return choice == BitChoice::High ? config.r_high : config.r_low;
}

double mean_square(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x * x;
  return acc / static_cast<double>(xs.size());
}

void require_field(bool ok, const char* field, const char* what) {
  if (!ok) throw ValidationError(std::string(field) + ": " + what);
}

} // namespace

void validate_config(const KljnConfig& config) {
  require_field(std::isfinite(config.r_low) && config.r_low > 0.0, "r_low",
                "must be finite and > 0");
  require_field(std::isfinite(config.r_high) && config.r_high > 0.0, "r_high",
                "must be finite and > 0");
  require_field(config.r_low != config.r_high, "r_low/r_high", "must be distinct");
  require_field(std::isfinite(config.noise_temperature) && config.noise_temperature > 0.0,
                "noise_temperature", "must be finite and > 0");
  require_field(std::isfinite(config.noise_cutoff) && config.noise_cutoff > 0.0,
                "noise_cutoff", "must be finite and > 0");
  const CableDerived d = derive(config.cable);
  require_field(config.noise_cutoff <= 0.01 * d.min_wave_frequency, "noise_cutoff",
                "must satisfy f_c <= 0.01 * f_min of the cable (quasi-static bound)");
  require_field(std::isfinite(config.sample_rate) &&
                    config.sample_rate >= 20.0 * config.noise_cutoff,
                "sample_rate", "must be >= 20 * noise_cutoff");
  require_field(std::isfinite(config.bit_period) && config.bit_period > 0.0, "bit_period",
                "must be finite and > 0");
  require_field(config.bit_period * config.noise_cutoff >= 1.0, "bit_period",
                "must cover at least one period of the noise cutoff");
  require_field(config.bit_period * config.sample_rate <= 1e9, "bit_period",
                "bit_period * sample_rate too large (> 1e9 samples)");
  require_field(config.bit_count >= 1, "bit_count", "must be >= 1");
}

KljnConfig config_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config JSON is not parseable: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config JSON must be an object");

  KljnConfig config;
  auto take_number = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    require_field(j[key].is_number(), key, "must be a number");
    out = j[key].get<double>();
    j.erase(key);
  };
  take_number("r_low", config.r_low);
  take_number("r_high", config.r_high);
  take_number("noise_temperature", config.noise_temperature);
  take_number("noise_cutoff", config.noise_cutoff);
  take_number("bit_period", config.bit_period);
  take_number("sample_rate", config.sample_rate);
  if (j.contains("rng_seed")) {
    require_field(j["rng_seed"].is_number_integer() || j["rng_seed"].is_number_unsigned(),
                  "rng_seed", "must be an integer");
    config.rng_seed = j["rng_seed"].get<std::uint64_t>();
    j.erase("rng_seed");
  }
  if (j.contains("bit_count")) {
    require_field(j["bit_count"].is_number_integer(), "bit_count", "must be an integer");
    config.bit_count = j["bit_count"].get<int>();
    j.erase("bit_count");
  }
  if (j.contains("cable")) {
    require_field(j["cable"].is_object(), "cable", "must be an object");
    config.cable = cable_from_json(j["cable"].dump());
    j.erase("cable");
  }
  if (!j.empty())
    throw ValidationError("config JSON has unknown key '" + j.begin().key() + "'");
  validate_config(config);
  return config;
}

DecodeLevels decode_levels(const KljnConfig& config) {
  validate_config(config);
  auto level = [&](double ra, double rb) {
    return johnson_mean_square(ra * rb / (ra + rb), config.noise_temperature,
                               config.noise_cutoff);
  };
  return {level(config.r_low, config.r_low), level(config.r_low, config.r_high),
          level(config.r_high, config.r_high)};
}

LoopTraces simulate_bit_period(const KljnConfig& config, BitChoice alice, BitChoice bob,
                               std::uint64_t bit_index) {
  validate_config(config);
  const std::vector<double> gen_alice = generate_band_limited_noise(
      resistor_of(config, alice), config.noise_temperature, config.noise_cutoff,
      config.bit_period, config.sample_rate, substream(config.rng_seed, bit_index, 1));
  const std::vector<double> gen_bob = generate_band_limited_noise(
      resistor_of(config, bob), config.noise_temperature, config.noise_cutoff,
      config.bit_period, config.sample_rate, substream(config.rng_seed, bit_index, 2));
  return integrate_pi_loop(config.cable, resistor_of(config, alice),
                           resistor_of(config, bob), gen_alice, gen_bob,
                           config.sample_rate);
}

DecodeOutcome decode_bit(BitChoice own_choice, double own_resistance,
                         const KljnConfig& config, double measured_mean_square_voltage) {
  const double expected = resistor_of(config, own_choice);
  if (!(std::isfinite(own_resistance)) ||
      std::abs(own_resistance - expected) > 1e-9 * expected)
    throw ValidationError("own_resistance does not match own_choice for this config");
  if (!(std::isfinite(measured_mean_square_voltage) && measured_mean_square_voltage >= 0.0))
    throw ValidationError("measured mean-square voltage must be finite and >= 0");

  const DecodeLevels levels = decode_levels(config);
  // Each level corresponds to a multiset of the two choices; classify,
  // then remove our own choice from the multiset to reveal the far end.
  struct Labeled {
    double level;
    BitChoice a, b;
  };
  std::array<Labeled, 3> bands = {{{levels.level_low_low, BitChoice::Low, BitChoice::Low},
                                   {levels.level_mixed, BitChoice::Low, BitChoice::High},
                                   {levels.level_high_high, BitChoice::High, BitChoice::High}}};
  std::sort(bands.begin(), bands.end(),
            [](const Labeled& x, const Labeled& y) { return x.level < y.level; });
  const double lower_threshold = std::sqrt(bands[0].level * bands[1].level);
  const double upper_threshold = std::sqrt(bands[1].level * bands[2].level);

  const Labeled& chosen = measured_mean_square_voltage < lower_threshold ? bands[0]
                          : measured_mean_square_voltage < upper_threshold
                              ? bands[1]
                              : bands[2];
  if (chosen.a == chosen.b) {
    // Homogeneous band: only consistent if we hold the same resistor.
    if (chosen.a != own_choice) return DecodeOutcome::Undecided;
    return chosen.a == BitChoice::Low ? DecodeOutcome::Low : DecodeOutcome::High;
  }
  return own_choice == BitChoice::Low ? DecodeOutcome::High : DecodeOutcome::Low;
}

double eve_loop_statistic(const LoopTraces& traces, const KljnConfig& config) {
  validate_config(config);
  if (traces.loop_current.empty())
    throw ValidationError("traces must contain at least one sample");
  const double msc = mean_square(traces.loop_current);
  if (!(msc > 0.0))
    throw NumericError("zero mean-square current; loop resistance estimate undefined");
  return 4.0 * constants::boltzmann * config.noise_temperature * config.noise_cutoff / msc;
}

double delay_probe(const KljnConfig& config, Direction direction, double probe_frequency) {
  validate_config(config);
  const CableDerived d = derive(config.cable);
  double f = probe_frequency;
  if (f == 0.0) f = std::min(config.noise_cutoff, config.sample_rate / 100.0);
  if (!(std::isfinite(f) && f > 0.0))
    throw ValidationError("probe frequency must be finite and > 0");
  if (f > 0.01 * d.min_wave_frequency)
    throw ValidationError("probe frequency must satisfy f <= 0.01 * f_min");
  if (f > config.sample_rate / 20.0)
    throw ValidationError("probe frequency must be <= sample_rate / 20");

  // Mixed (secure) assignment: Alice holds r_high, Bob holds r_low.
  const double r_alice = config.r_high;
  const double r_bob = config.r_low;

  // The probe measures the wave-free delay law tau = L_c / R_far, which
  // is a lossless statement: with loss the pi section adds a constant
  // R_c C_c / 2 lag that has nothing to do with propagation and would
  // bias large-R_far delays.  Probe the lossless equivalent.
  CableSpec probe_cable = config.cable;
  probe_cable.resistance_per_meter = 0.0;

  const double settle_periods = 10.0, measure_periods = 20.0;
  const std::size_t n = static_cast<std::size_t>(
      std::llround((settle_periods + measure_periods) / f * config.sample_rate));
  const std::size_t skip = static_cast<std::size_t>(
      std::llround(settle_periods / f * config.sample_rate));

  std::vector<double> drive(n), quiet(n, 0.0);
  const double omega = 2.0 * constants::pi * f;
  for (std::size_t i = 0; i < n; ++i)
    drive[i] = std::sin(omega * static_cast<double>(i) / config.sample_rate);

  const bool alice_drives = direction == Direction::TowardBob;
  const LoopTraces traces = integrate_pi_loop(
      probe_cable, r_alice, r_bob, alice_drives ? drive : quiet,
      alice_drives ? quiet : drive, config.sample_rate);

  const std::vector<double>& near = alice_drives ? traces.u_alice_end : traces.u_bob_end;
  const std::vector<double>& far = alice_drives ? traces.u_bob_end : traces.u_alice_end;
  const std::complex<double> p_near = fit_tone(near, config.sample_rate, f, skip);
  const std::complex<double> p_far = fit_tone(far, config.sample_rate, f, skip);
  const double phase = std::arg(p_far / p_near);
  if (std::abs(phase) < 1e-12)
    throw NumericError("phase lag below the numeric floor; delay unmeasurable");
  return std::abs(phase) / (2.0 * constants::pi * f);
}

ExchangeReport run_exchange(const KljnConfig& config) {
  validate_config(config);

  std::mt19937_64 choice_rng(substream(config.rng_seed, 0xC01CE5ULL, 0));
  ExchangeReport report;
  report.exchanges.reserve(static_cast<std::size_t>(config.bit_count));

  std::vector<double> eve_hl, eve_lh, eve_ll, eve_hh;
  std::size_t decode_errors = 0, secure_count = 0;

  for (int k = 0; k < config.bit_count; ++k) {
    const BitChoice alice = (choice_rng() & 1) ? BitChoice::High : BitChoice::Low;
    const BitChoice bob = (choice_rng() & 1) ? BitChoice::High : BitChoice::Low;
    const LoopTraces traces =
        simulate_bit_period(config, alice, bob, static_cast<std::uint64_t>(k));

    BitExchange bit;
    bit.alice_choice = alice;
    bit.bob_choice = bob;
    bit.secure = alice != bob;
    bit.mean_square_voltage = mean_square(traces.u_alice_end);
    bit.mean_square_current = mean_square(traces.loop_current);
    const double msv_bob = mean_square(traces.u_bob_end);
    bit.alice_decoded_bob = decode_bit(alice, resistor_of(config, alice), config,
                                       bit.mean_square_voltage);
    bit.bob_decoded_alice = decode_bit(bob, resistor_of(config, bob), config, msv_bob);

    const auto matches = [](DecodeOutcome decoded, BitChoice actual) {
      return (decoded == DecodeOutcome::Low && actual == BitChoice::Low) ||
             (decoded == DecodeOutcome::High && actual == BitChoice::High);
    };
    if (!matches(bit.alice_decoded_bob, bob)) ++decode_errors;
    if (!matches(bit.bob_decoded_alice, alice)) ++decode_errors;
    if (bit.secure) ++secure_count;

    const double r_hat = eve_loop_statistic(traces, config);
    if (alice == BitChoice::High && bob == BitChoice::Low) eve_hl.push_back(r_hat);
    else if (alice == BitChoice::Low && bob == BitChoice::High) eve_lh.push_back(r_hat);
    else if (alice == BitChoice::Low) eve_ll.push_back(r_hat);
    else eve_hh.push_back(r_hat);

    report.exchanges.push_back(bit);
  }

  const double bits = static_cast<double>(config.bit_count);
  report.legit_error_rate = static_cast<double>(decode_errors) / (2.0 * bits);
  report.secure_fraction = static_cast<double>(secure_count) / bits;

  auto group_p = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) return 1.0; // no evidence of a difference
    return welch_t_test(a, b).p_value;
  };
  report.eve_hl_lh_pvalue = group_p(eve_hl, eve_lh);
  report.eve_ll_hh_pvalue = group_p(eve_ll, eve_hh);

  report.delay_toward_bob = delay_probe(config, Direction::TowardBob);
  report.delay_toward_alice = delay_probe(config, Direction::TowardAlice);
  return report;
}

} // namespace kljn
