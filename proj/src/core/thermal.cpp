#include "core/thermal.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/quadrature.hpp"

namespace kljn {

namespace {

struct LoopResistances {
  double parallel = 0.0;
  double sum = 0.0;
};

LoopResistances loop_resistances(const CableDerived& d,
                                 const std::optional<Termination>& termination) {
  double ra = d.wave_impedance, rb = d.wave_impedance;
  if (termination) {
    ra = termination->resistance_alice;
    rb = termination->resistance_bob;
    if (!(std::isfinite(ra) && ra > 0.0 && std::isfinite(rb) && rb > 0.0))
      throw ValidationError("terminations must be finite and > 0");
  }
  return {ra * rb / (ra + rb), ra + rb};
}

void check_config(const ThermalConfig& config) {
  if (!(std::isfinite(config.temperature) && config.temperature > 0.0))
    throw ValidationError("temperature must be finite and > 0");
  if (!(std::isfinite(config.noise_cutoff) && config.noise_cutoff > 0.0))
    throw ValidationError("noise cutoff must be finite and > 0");
}

} // namespace

CornerFrequencies corner_frequencies(const CableSpec& cable,
                                     const std::optional<Termination>& termination) {
  const CableDerived d = derive(cable);
  const LoopResistances r = loop_resistances(d, termination);
  CornerFrequencies c;
  c.corner_electric = 1.0 / (2.0 * constants::pi * d.total_capacitance * r.parallel);
  c.corner_magnetic = r.sum / (2.0 * constants::pi * d.total_inductance);
  return c;
}

EnergyBudget thermal_energies(const CableSpec& cable, const ThermalConfig& config,
                              ThermalMethod method) {
  check_config(config);
  const CableDerived d = derive(cable);
  const LoopResistances r = loop_resistances(d, config.termination);
  const CornerFrequencies corners = corner_frequencies(cable, config.termination);

  const double kt = constants::boltzmann * config.temperature;
  const double fc = config.noise_cutoff;
  // One-sided Johnson densities seen by the cable reactances: the two
  // generators drive the parallel pair across C_c and the series loop
  // through L_c.
  const double s_voltage = 4.0 * kt * r.parallel;
  const double s_current = 4.0 * kt / r.sum;

  double mean_sq_voltage = 0.0, mean_sq_current = 0.0;
  switch (method) {
  case ThermalMethod::ClosedForm:
    mean_sq_voltage =
        s_voltage * corners.corner_electric * std::atan(fc / corners.corner_electric);
    mean_sq_current =
        s_current * corners.corner_magnetic * std::atan(fc / corners.corner_magnetic);
    break;
  case ThermalMethod::NumericIntegral: {
    auto lorentzian = [](double corner) {
      return [corner](double f) {
        const double x = f / corner;
        return 1.0 / (1.0 + x * x);
      };
    };
    mean_sq_voltage =
        s_voltage * integrate_adaptive(lorentzian(corners.corner_electric), 0.0, fc, 1e-12);
    mean_sq_current =
        s_current * integrate_adaptive(lorentzian(corners.corner_magnetic), 0.0, fc, 1e-12);
    break;
  }
  }

  EnergyBudget budget;
  budget.electric_energy = 0.5 * d.total_capacitance * mean_sq_voltage;
  budget.magnetic_energy = 0.5 * d.total_inductance * mean_sq_current;
  budget.per_mode_quota = 0.5 * kt;
  budget.deficit_electric = budget.electric_energy / budget.per_mode_quota;
  budget.deficit_magnetic = budget.magnetic_energy / budget.per_mode_quota;
  budget.corner_electric = corners.corner_electric;
  budget.corner_magnetic = corners.corner_magnetic;
  return budget;
}

EnergyBudget linearized_energies(const CableSpec& cable, const ThermalConfig& config) {
  check_config(config);
  const CableDerived d = derive(cable);
  const LoopResistances r = loop_resistances(d, config.termination);
  const CornerFrequencies corners = corner_frequencies(cable, config.termination);

  const double kt = constants::boltzmann * config.temperature;
  const double fc = config.noise_cutoff;

  EnergyBudget budget;
  budget.electric_energy = 0.5 * d.total_capacitance * 4.0 * kt * r.parallel * fc;
  budget.magnetic_energy = 0.5 * d.total_inductance * 4.0 * kt / r.sum * fc;
  budget.per_mode_quota = 0.5 * kt;
  budget.deficit_electric = budget.electric_energy / budget.per_mode_quota;
  budget.deficit_magnetic = budget.magnetic_energy / budget.per_mode_quota;
  budget.corner_electric = corners.corner_electric;
  budget.corner_magnetic = corners.corner_magnetic;
  return budget;
}

DeficitPair equipartition_deficit(const EnergyBudget& budget) {
  if (!(budget.per_mode_quota > 0.0))
    throw ValidationError("budget must carry a positive per-mode quota");
  return {budget.electric_energy / budget.per_mode_quota,
          budget.magnetic_energy / budget.per_mode_quota};
}

double instantaneous_energy_ratio(const CableSpec& cable, double load_resistance) {
  if (!(std::isfinite(load_resistance) && load_resistance >= 0.0))
    throw ValidationError("load resistance must be finite and >= 0");
  const CableDerived d = derive(cable);
  const double x = load_resistance / d.wave_impedance;
  return x * x;
}

double planck_intensity(double frequency, double temperature) {
  if (!(std::isfinite(frequency) && frequency > 0.0))
    throw ValidationError("frequency must be finite and > 0");
  if (!(std::isfinite(temperature) && temperature > 0.0))
    throw ValidationError("temperature must be finite and > 0");
  const double x = constants::planck * frequency / (constants::boltzmann * temperature);
  const double pref = 4.0 * constants::pi * constants::planck * frequency * frequency *
                      frequency / (constants::speed_of_light * constants::speed_of_light);
  if (x > 700.0) return pref * std::exp(-x); // expm1 would overflow; e^-x to ~e^-x accuracy
  return pref / std::expm1(x);
}

} // namespace kljn
