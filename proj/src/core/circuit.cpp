#include "core/circuit.hpp"

#include <array>
#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace kljn {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Mat3 invert3(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  if (!(std::isfinite(det)) || det == 0.0)
    throw NumericError("singular 3x3 system in integrator setup");
  const double inv = 1.0 / det;
  Mat3 r;
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * inv;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * inv;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * inv;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * inv;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * inv;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * inv;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * inv;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * inv;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * inv;
  return r;
}

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return r;
}

} // namespace

LoopTraces integrate_pi_loop(const CableSpec& cable, double r_alice, double r_bob,
                             std::span<const double> generator_alice,
                             std::span<const double> generator_bob,
                             double sample_rate, EnergyBalance* balance) {
  if (!(std::isfinite(r_alice) && r_alice > 0.0) ||
      !(std::isfinite(r_bob) && r_bob > 0.0))
    throw ValidationError("loop resistances must be finite and > 0");
  if (!(std::isfinite(sample_rate) && sample_rate > 0.0))
    throw ValidationError("sample rate must be finite and > 0");
  if (generator_alice.size() != generator_bob.size())
    throw ValidationError("generator waveforms must have equal length");
  if (generator_alice.size() < 2)
    throw ValidationError("need at least 2 samples to integrate");

  const CableDerived d = derive(cable);
  const double c_half = 0.5 * d.total_capacitance;
  const double l = d.total_inductance;
  const double r_cab = d.total_resistance;
  const double h = 1.0 / sample_rate;

  // State x = [v1 (Alice node), v2 (Bob node), iL]; rhs = A x + inputs.
  const Mat3 a = {{{-1.0 / (r_alice * c_half), 0.0, -1.0 / c_half},
                   {0.0, -1.0 / (r_bob * c_half), 1.0 / c_half},
                   {1.0 / l, -1.0 / l, -r_cab / l}}};
  Mat3 m_minus{}, m_plus{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      m_minus[i][j] = (i == j ? 1.0 : 0.0) - 0.5 * h * a[i][j];
      m_plus[i][j] = (i == j ? 1.0 : 0.0) + 0.5 * h * a[i][j];
    }
  const Mat3 m_inv = invert3(m_minus);
  const Mat3 step = mat_mul(m_inv, m_plus);
  const Vec3 w_alice = mat_vec(m_inv, {0.5 * h / (r_alice * c_half), 0.0, 0.0});
  const Vec3 w_bob = mat_vec(m_inv, {0.0, 0.5 * h / (r_bob * c_half), 0.0});

  const std::size_t n = generator_alice.size();
  LoopTraces traces;
  traces.sample_rate = sample_rate;
  traces.u_alice_end.resize(n);
  traces.u_bob_end.resize(n);
  traces.loop_current.resize(n);

  // Quasi-static initial state for the first generator samples: the run
  // begins settled instead of ringing down a step transient.
  Vec3 x;
  x[2] = (generator_alice[0] - generator_bob[0]) / (r_alice + r_bob + r_cab);
  x[0] = generator_alice[0] - x[2] * r_alice;
  x[1] = generator_bob[0] + x[2] * r_bob;

  double e_source = 0.0, e_dissipated = 0.0;
  const double e_stored_0 =
      0.5 * c_half * (x[0] * x[0] + x[1] * x[1]) + 0.5 * l * x[2] * x[2];

  traces.u_alice_end[0] = x[0];
  traces.u_bob_end[0] = x[1];
  traces.loop_current[0] = x[2];

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double ua0 = generator_alice[i], ua1 = generator_alice[i + 1];
    const double ub0 = generator_bob[i], ub1 = generator_bob[i + 1];
    Vec3 next = mat_vec(step, x);
    for (int j = 0; j < 3; ++j)
      next[j] += w_alice[j] * (ua0 + ua1) + w_bob[j] * (ub0 + ub1);

    // Midpoint (trapezoid-consistent) energy bookkeeping.
    const double ua_bar = 0.5 * (ua0 + ua1);
    const double ub_bar = 0.5 * (ub0 + ub1);
    const double v1_bar = 0.5 * (x[0] + next[0]);
    const double v2_bar = 0.5 * (x[1] + next[1]);
    const double il_bar = 0.5 * (x[2] + next[2]);
    const double ia_bar = (ua_bar - v1_bar) / r_alice;
    const double ib_bar = (v2_bar - ub_bar) / r_bob;
    e_source += h * (ua_bar * ia_bar - ub_bar * ib_bar);
    e_dissipated +=
        h * (ia_bar * ia_bar * r_alice + ib_bar * ib_bar * r_bob + il_bar * il_bar * r_cab);

    x = next;
    traces.u_alice_end[i + 1] = x[0];
    traces.u_bob_end[i + 1] = x[1];
    traces.loop_current[i + 1] = x[2];
  }

  if (!(std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2])))
    throw NumericError("integration diverged (non-finite state)");

  const double e_stored_1 =
      0.5 * c_half * (x[0] * x[0] + x[1] * x[1]) + 0.5 * l * x[2] * x[2];
  EnergyBalance eb;
  eb.source_energy = e_source;
  eb.dissipated_energy = e_dissipated;
  eb.stored_delta = e_stored_1 - e_stored_0;
  const double scale = std::max({std::abs(eb.source_energy), eb.dissipated_energy,
                                 std::abs(eb.stored_delta), 1e-300});
  eb.residual = std::abs(eb.source_energy - eb.dissipated_energy - eb.stored_delta) / scale;
  if (eb.residual > 1e-6)
    throw NumericError("integrator energy balance violated (residual > 1e-6)");
  if (balance) *balance = eb;
  return traces;
}

std::complex<double> fit_tone(std::span<const double> samples, double sample_rate,
                              double frequency, std::size_t skip) {
  if (!(std::isfinite(sample_rate) && sample_rate > 0.0))
    throw ValidationError("sample rate must be finite and > 0");
  if (!(std::isfinite(frequency) && frequency > 0.0 && frequency < sample_rate / 2.0))
    throw ValidationError("fit frequency must lie in (0, Nyquist)");
  if (samples.size() < skip + 16)
    throw ValidationError("too few samples to fit a tone");
  const std::size_t n_fit = samples.size() - skip;
  if (static_cast<double>(n_fit) / sample_rate * frequency < 1.0)
    throw ValidationError("fit window must cover at least one period");

  const double omega = 2.0 * constants::pi * frequency;
  Mat3 g{};
  Vec3 rhs{};
  for (std::size_t i = skip; i < samples.size(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const Vec3 basis = {std::cos(omega * t), std::sin(omega * t), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) g[r][c] += basis[r] * basis[c];
      rhs[r] += basis[r] * samples[i];
    }
  }
  const Vec3 coef = mat_vec(invert3(g), rhs);
  return {coef[0], -coef[1]}; // s(t) = Re(P exp(j w t))
}

} // namespace kljn
