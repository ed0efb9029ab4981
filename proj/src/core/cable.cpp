#include "core/cable.hpp"

#include <cmath>

#include <json.hpp>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace kljn {

namespace {

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

} // namespace

CableDerived derive(const CableSpec& spec) {
  require(std::isfinite(spec.inductance_per_meter) && spec.inductance_per_meter > 0.0,
          "cable inductance per meter must be finite and > 0");
  require(std::isfinite(spec.capacitance_per_meter) && spec.capacitance_per_meter > 0.0,
          "cable capacitance per meter must be finite and > 0");
  require(std::isfinite(spec.resistance_per_meter) && spec.resistance_per_meter >= 0.0,
          "cable resistance per meter must be finite and >= 0");
  require(std::isfinite(spec.length) && spec.length > 0.0,
          "cable length must be finite and > 0");

  CableDerived d;
  d.total_inductance = spec.inductance_per_meter * spec.length;
  d.total_capacitance = spec.capacitance_per_meter * spec.length;
  d.total_resistance = spec.resistance_per_meter * spec.length;
  d.wave_velocity = 1.0 / std::sqrt(spec.inductance_per_meter * spec.capacitance_per_meter);
  d.wave_impedance = std::sqrt(spec.inductance_per_meter / spec.capacitance_per_meter);
  d.min_wave_frequency = d.wave_velocity / (2.0 * spec.length);
  return d;
}

QuasiStaticVerdict quasi_static_verdict(const CableSpec& spec, double frequency,
                                        double margin) {
  require(std::isfinite(frequency) && frequency >= 0.0, "frequency must be finite and >= 0");
  require(std::isfinite(margin) && margin > 0.0 && margin < 1.0,
          "quasi-static margin must be in (0, 1)");
  const CableDerived d = derive(spec);
  QuasiStaticVerdict v;
  v.min_wave_frequency = d.min_wave_frequency;
  v.ratio = frequency / d.min_wave_frequency;
  v.admissible = frequency <= margin * d.min_wave_frequency;
  return v;
}

std::vector<double> mode_frequencies(const CableSpec& spec, int n_max) {
  require(n_max >= 1, "mode count must be >= 1");
  const CableDerived d = derive(spec);
  std::vector<double> modes;
  modes.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n)
    modes.push_back(n * d.min_wave_frequency);
  return modes;
}

std::complex<double> cable_series_impedance(const CableSpec& spec, double frequency,
                                            bool include_loss) {
  require(std::isfinite(frequency) && frequency >= 0.0, "frequency must be finite and >= 0");
  const CableDerived d = derive(spec);
  const double omega = 2.0 * constants::pi * frequency;
  return {include_loss ? d.total_resistance : 0.0, omega * d.total_inductance};
}

CableSpec cable_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("cable JSON is not parseable: ") + e.what());
  }
  require(j.is_object(), "cable JSON must be an object");

  auto number = [&](const char* key) {
    require(j.contains(key), std::string("cable JSON is missing key '") + key + "'");
    require(j[key].is_number(), std::string("cable JSON key '") + key + "' must be a number");
    return j[key].get<double>();
  };

  CableSpec spec;
  spec.inductance_per_meter = number("l_per_m");
  spec.capacitance_per_meter = number("c_per_m");
  spec.resistance_per_meter = number("r_per_m");
  spec.length = number("length_m");
  derive(spec); // validate
  return spec;
}

CableSpec preset_cable(const std::string& name) {
  if (name == "rg58-1m5")
    return CableSpec{0.25e-6, 100.0e-12, 0.021, 1.5};
  throw ValidationError("unknown cable preset '" + name + "'");
}

} // namespace kljn
