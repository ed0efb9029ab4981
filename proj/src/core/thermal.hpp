#pragma once

#include <optional>

#include "core/cable.hpp"
#include "core/network.hpp"

namespace kljn {

/// Thermal-noise scenario for the cable.  When `termination` is empty
/// the cable is matched: R_A = R_B = R_w.
struct ThermalConfig {
  double temperature = 0.0;  // K
  double noise_cutoff = 0.0; // f_c [Hz]
  std::optional<Termination> termination;
};

/// Lorentzian corner frequencies of the terminated cable.  The electric
/// corner is set by C_c against the parallel resultant of the two end
/// resistors; the magnetic one by L_c against their series sum.  For the
/// matched cable both equal (2/pi) * f_min.
struct CornerFrequencies {
  double corner_electric = 0.0; // f_0C = 1/(2 pi C_c R_par) [Hz]
  double corner_magnetic = 0.0; // f_0L = (R_A + R_B)/(2 pi L_c) [Hz]
};

/// Thermal energies stored in the cable reactances against the kT/2
/// equipartition quota of a single wave-mode degree of freedom.
struct EnergyBudget {
  double electric_energy = 0.0;   // E_e,th = (1/2) C_c <U^2> [J]
  double magnetic_energy = 0.0;   // E_m,th = (1/2) L_c <I^2> [J]
  double per_mode_quota = 0.0;    // kT/2 [J]
  double deficit_electric = 0.0;  // electric_energy / quota
  double deficit_magnetic = 0.0;  // magnetic_energy / quota
  double corner_electric = 0.0;   // [Hz]
  double corner_magnetic = 0.0;   // [Hz]
};

struct DeficitPair {
  double deficit_electric = 0.0;
  double deficit_magnetic = 0.0;
};

/// How to evaluate the band-limited Lorentzian noise integrals.
enum class ThermalMethod { ClosedForm, NumericIntegral };

CornerFrequencies corner_frequencies(const CableSpec& cable,
                                     const std::optional<Termination>& termination);

/// Band-limited Johnson-noise energy budget.  ClosedForm uses the exact
/// arctan antiderivative of the Lorentzian; NumericIntegral evaluates
/// the same integral by adaptive quadrature (they agree to 1e-9
/// relative).  Throws NumericError if the quadrature fails to converge.
EnergyBudget thermal_energies(const CableSpec& cable, const ThermalConfig& config,
                              ThermalMethod method);

/// Small-cutoff linearization of the same energies (arctan x ~ x),
/// exposed for comparison and never substituted for the exact form.
/// Matched case: each energy ~ (kT/2) * (f_c / f_min).
EnergyBudget linearized_energies(const CableSpec& cable, const ThermalConfig& config);

/// Energies measured against the kT/2 quota.
DeficitPair equipartition_deficit(const EnergyBudget& budget);

/// Quasi-static instantaneous ratio E_e(t)/E_m(t) = (C_c/L_c) R_load^2,
/// computed as (R_load/R_w)^2 so a matched load yields exactly 1.
double instantaneous_energy_ratio(const CableSpec& cable, double load_resistance);

/// Planck radiation intensity I(f) = (4 pi h f^3 / c^2) / (e^{hf/kT} - 1)
/// in W m^-2 Hz^-1 per polarization; stable in both the classical
/// (hf << kT) and the deep quantum (hf >> kT) regimes.
double planck_intensity(double frequency, double temperature);

} // namespace kljn
