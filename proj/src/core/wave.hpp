#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "core/cable.hpp"
#include "core/network.hpp"

namespace kljn {

/// Exact (telegrapher) description of the lossless line at one frequency.
/// The chain matrix relates end voltages/currents:
///   A = D = cos(bD), B = j R_w sin(bD), C = j sin(bD) / R_w
/// with electrical length bD = 2 pi f D / v_c.
struct LineTwoPort {
  double frequency = 0.0;
  double electrical_length = 0.0; // bD [rad]
  TwoPort chain_matrix;
};

/// Summary of how a noise bandwidth relates to the line's wave modes.
/// KLJN-compliant configurations must report zero modes below the cutoff.
struct ForbiddenBandReport {
  double cutoff = 0.0;             // f_c
  double min_wave_frequency = 0.0; // f_min
  double ratio = 0.0;              // f_c / f_min
  int mode_count_below_cutoff = 0; // floor(f_c / f_min)
};

/// Best single-velocity explanation of a pair of directional delays.
/// A d'Alembert picture demands one velocity for both directions; the
/// residual is the irreducible per-direction misfit |tau_ab - tau_ba|/2.
struct VelocityFit {
  double velocity = 0.0; // length / mean delay [m/s]
  double residual = 0.0; // seconds
};

/// Evaluates the exact chain matrix.  The oracle is defined for lossless
/// lines only; a cable with nonzero series resistance is rejected.
LineTwoPort line_two_port(const CableSpec& cable, double frequency);

/// Input impedance of the line terminated by a real `load` at the far
/// end.  Pass an infinite load for the open-ended line.  A matched load
/// (R_w) returns exactly R_w at every frequency.
std::complex<double> input_impedance(const CableSpec& cable, double load, double frequency);

/// Exact far-end/near-end node-voltage ratio for the driven line,
/// including standing-wave effects at all frequencies.  The near end is
/// `term.drive_end`; as the electrical length vanishes the ratio tends
/// to 1 (both nodes coincide and the divider is purely resistive).
std::complex<double> exact_transfer(const CableSpec& cable, const Termination& term,
                                    double frequency);

/// d'Alembert field U(x,t) = u_plus(t - x/v) + u_minus(t + x/v): the
/// superposition of counter-propagating waveforms at a single velocity.
/// Provided as the hypothesis under test -- directional delay
/// measurements show no single v can reproduce them (see VelocityFit).
double dalembert_field(const std::function<double(double)>& u_plus,
                       const std::function<double(double)>& u_minus,
                       double position, double time, double velocity);

/// Counts wave modes admitted below a noise cutoff.
ForbiddenBandReport forbidden_band_report(const CableSpec& cable, double cutoff);

/// Resonances of the short-circuited line, located by bracketed bisection
/// on Im(Z_in) to 1e-9 relative tolerance.  Returns f_n for n = 1..n_max;
/// each must land on n * v_c / (2D).
std::vector<double> shorted_line_resonances(const CableSpec& cable, int n_max);

/// Least-misfit single velocity for a measured delay pair.
VelocityFit fit_single_velocity(double tau_toward_bob, double tau_toward_alice,
                                double length);

} // namespace kljn
