#pragma once

#include <complex>
#include <span>
#include <vector>

#include "core/cable.hpp"

namespace kljn {

/// Lumped approximations of the cable, in increasing fidelity:
///  - LosslessL: single series inductor L_c
///  - LossyRL:   series R_c + L_c
///  - PiRLC:     series R_c + L_c with C_c/2 shunt at each end node
///  - LadderN:   N identical cascaded sections, each with series
///               (R_c + L_c)/N and shunt C_c/N
enum class Topology { LosslessL, LossyRL, PiRLC, LadderN };

struct NetworkModel {
  Topology topology = Topology::LossyRL;
  int segment_count = 8; // LadderN only; ignored otherwise
};

enum class End { Alice, Bob };

/// Loop terminations.  The generator sits in series with the resistor at
/// `drive_end`; the far-end resistor shunts its node to ground.
struct Termination {
  double resistance_alice = 0.0;
  double resistance_bob = 0.0;
  End drive_end = End::Alice;
  double drive_amplitude = 1.0; // generator phasor amplitude [V]
};

/// Signal direction for phase/delay measurements.  TowardBob means the
/// generator sits at Alice's end and the response is read at Bob's.
enum class Direction { TowardBob, TowardAlice };

/// Chain (ABCD) representation of the cable between the two terminations.
struct TwoPort {
  std::complex<double> a, b, c, d;
};

/// Node voltages and loop current for a single-generator drive.
/// `loop_current` is the current entering the cable at the driven end;
/// for the no-shunt topologies it is the current everywhere in the loop.
struct PhasorSolution {
  double frequency = 0.0;
  std::complex<double> voltage_alice_end;
  std::complex<double> voltage_bob_end;
  std::complex<double> drop_u_ab; // voltage_alice_end - voltage_bob_end
  std::complex<double> loop_current;
};

/// One row of an AC sweep.  `magnitude` is |U_AB| in volts at the given
/// drive amplitude.  Phases are radians; `phase` is wrapped to (-pi, pi],
/// `phase_unwrapped` is continuous along the sweep.
struct SweepRow {
  double frequency = 0.0;
  double magnitude = 0.0;
  double phase = 0.0;
  double phase_unwrapped = 0.0;
};

/// Result of checking the quasi-static "U_AB tracks the derivative of the
/// generator" behaviour against the lossless lumped response.
struct DerivativeCheck {
  double residual = 0.0; // relative L2 mismatch of the two series below
  std::vector<double> simulated_drop;       // lossless-L circuit response
  std::vector<double> reference_derivative; // L_c/(R_A+R_B) * du/dt
};

/// Chain matrix of the chosen lumped model at `frequency`.
TwoPort cable_two_port(const NetworkModel& model, const CableSpec& cable, double frequency);

/// Solves the driven loop at a single frequency.  Both terminations must
/// be finite positive resistances.
PhasorSolution solve_phasor(const NetworkModel& model, const CableSpec& cable,
                            const Termination& term, double frequency);

/// Phase of the far-end node voltage relative to the drive-end node
/// voltage, in (-pi, pi].  The drive end is chosen from `direction`;
/// `term.drive_end` is ignored.  For LosslessL this matches
/// -arctan(2 pi f L_c / R_far), the small-angle -2 pi f L_c / R_far.
double phase_shift(const NetworkModel& model, const CableSpec& cable,
                   const Termination& term, double frequency, Direction direction);

/// Quasi-static one-way delay L_c / R_far (lossless limit): the apparent
/// lag depends only on the resistor at the receiving end, not on any
/// propagation velocity -- and is therefore direction-asymmetric
/// whenever the terminations differ.
double time_delay(const CableSpec& cable, const Termination& term, Direction direction);

/// Phase velocity a wave interpretation would need in order to explain
/// the steady-state phase lag: v = 2 pi f D / |phase|.  May exceed the
/// speed of light; the lag is a filter property of the driven impedance
/// system, not a signal propagation time.  Throws NumericError when the
/// phase is too small to resolve.
double equivalent_phase_velocity(const NetworkModel& model, const CableSpec& cable,
                                 const Termination& term, double frequency,
                                 Direction direction);

/// Log-spaced sweep of the cable voltage drop U_AB.  Magnitude is |U_AB|
/// in volts at the given drive amplitude; phase is measured against the
/// Alice-end node voltage (the node joining Alice's resistor to the cable).
std::vector<SweepRow> ac_sweep(const NetworkModel& model, const CableSpec& cable,
                               const Termination& term, double f_start, double f_stop,
                               int points_per_decade);

/// Feeds `generator_waveform` through the lossless lumped loop and
/// compares the cable drop against the scaled derivative of the drive.
/// The waveform must span at least ten periods of its slowest component
/// and stay band-limited below min_wave_frequency/10.
DerivativeCheck derivative_response_check(const CableSpec& cable, const Termination& term,
                                          std::span<const double> generator_waveform,
                                          double sample_interval);

} // namespace kljn
