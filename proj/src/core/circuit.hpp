#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "core/cable.hpp"

namespace kljn {

/// Time-domain node/branch traces of the simulated loop.
struct LoopTraces {
  std::vector<double> u_alice_end;  // cable-side node voltage at Alice [V]
  std::vector<double> u_bob_end;    // cable-side node voltage at Bob [V]
  std::vector<double> loop_current; // series-branch (inductor) current [A]
  double sample_rate = 0.0;
};

/// Discrete energy bookkeeping of one integration run.  The residual is
/// |source - dissipated - stored_delta| relative to the largest term;
/// the trapezoidal scheme keeps it at rounding level.
struct EnergyBalance {
  double source_energy = 0.0;     // delivered by both generators [J]
  double dissipated_energy = 0.0; // burned in R_A, R_B, R_c [J]
  double stored_delta = 0.0;      // change of capacitor + inductor energy [J]
  double residual = 0.0;
};

/// Integrates the loop generator_A + R_A + pi-RLC cable + R_B +
/// generator_B with fixed-step trapezoidal stepping of the state
/// (two shunt-capacitor voltages, inductor current).  The initial state
/// is the quasi-static solution of the first generator samples, so each
/// run starts settled.  Throws NumericError if the energy residual
/// exceeds 1e-6 or the state leaves the finite range -- the step is
/// never silently clipped.
LoopTraces integrate_pi_loop(const CableSpec& cable, double r_alice, double r_bob,
                             std::span<const double> generator_alice,
                             std::span<const double> generator_bob,
                             double sample_rate, EnergyBalance* balance = nullptr);

/// Least-squares single-tone fit (cos/sin/DC basis) over samples from
/// `skip` onward, sharing the t = index/sample_rate time base so phases
/// of separately fitted channels are directly comparable.  Returns the
/// phasor P with s(t) = Re(P * exp(j*2*pi*f*t)).
std::complex<double> fit_tone(std::span<const double> samples, double sample_rate,
                              double frequency, std::size_t skip = 0);

} // namespace kljn
