#include "kljn/kljn.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "core/cable.hpp"
#include "core/errors.hpp"
#include "core/exchange.hpp"
#include "core/network.hpp"
#include "core/thermal.hpp"
#include "core/wave.hpp"

namespace {

thread_local std::string g_last_error = "no error";

kljn_status fail(kljn_status status, const char* message) {
  g_last_error = message;
  return status;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
kljn_status guarded(Fn&& fn) {
  try {
    fn();
    return KLJN_OK;
  } catch (const kljn::ValidationError& e) {
    return fail(KLJN_ERR_VALIDATION, e.what());
  } catch (const kljn::NumericError& e) {
    return fail(KLJN_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(KLJN_ERR_UNKNOWN, "out of memory");
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KLJN_ERR_UNKNOWN;
  } catch (...) {
    return fail(KLJN_ERR_UNKNOWN, "unknown error");
  }
}

kljn_status require_args(bool ok) {
  return ok ? KLJN_OK : fail(KLJN_ERR_NULL_ARGUMENT, "required argument is NULL");
}

kljn::CableSpec to_spec(const kljn_cable_params& p) {
  return {p.inductance_per_meter, p.capacitance_per_meter, p.resistance_per_meter, p.length};
}

kljn::Termination to_termination(const kljn_termination& t) {
  kljn::Termination out;
  out.resistance_alice = t.resistance_alice;
  out.resistance_bob = t.resistance_bob;
  out.drive_end = t.drive_end == KLJN_END_BOB ? kljn::End::Bob : kljn::End::Alice;
  out.drive_amplitude = t.drive_amplitude;
  return out;
}

kljn::NetworkModel to_model(kljn_topology topology, int segment_count) {
  kljn::NetworkModel model;
  switch (topology) {
  case KLJN_TOPOLOGY_LOSSLESS_L: model.topology = kljn::Topology::LosslessL; break;
  case KLJN_TOPOLOGY_LOSSY_RL: model.topology = kljn::Topology::LossyRL; break;
  case KLJN_TOPOLOGY_PI_RLC: model.topology = kljn::Topology::PiRLC; break;
  case KLJN_TOPOLOGY_LADDER_N: model.topology = kljn::Topology::LadderN; break;
  default: throw kljn::ValidationError("unknown topology enumerator");
  }
  model.segment_count = segment_count;
  return model;
}

kljn::Direction to_direction(kljn_direction d) {
  if (d != KLJN_TOWARD_BOB && d != KLJN_TOWARD_ALICE)
    throw kljn::ValidationError("unknown direction enumerator");
  return d == KLJN_TOWARD_BOB ? kljn::Direction::TowardBob : kljn::Direction::TowardAlice;
}

kljn::KljnConfig to_config(const kljn_sim_params& p) {
  kljn::KljnConfig config;
  config.r_low = p.r_low;
  config.r_high = p.r_high;
  config.noise_temperature = p.noise_temperature;
  config.noise_cutoff = p.noise_cutoff;
  config.cable = to_spec(p.cable);
  config.bit_period = p.bit_period;
  config.sample_rate = p.sample_rate;
  config.rng_seed = p.rng_seed;
  config.bit_count = p.bit_count;
  return config;
}

int32_t from_outcome(kljn::DecodeOutcome outcome) {
  switch (outcome) {
  case kljn::DecodeOutcome::Low: return 0;
  case kljn::DecodeOutcome::High: return 1;
  case kljn::DecodeOutcome::Undecided: return 2;
  }
  return 2;
}

} // namespace

struct kljn_cable {
  kljn::CableSpec spec;
};

struct kljn_sweep {
  std::vector<kljn::SweepRow> rows;
};

struct kljn_report {
  kljn::ExchangeReport report;
};

struct kljn_trace {
  kljn::LoopTraces traces;
};

extern "C" {

const char* kljn_last_error(void) { return g_last_error.c_str(); }

const char* kljn_version(void) { return "0.1.0"; }

/* ---------------------------------------------------------------- cable */

kljn_status kljn_cable_create(const kljn_cable_params* params, kljn_cable** out) {
  if (kljn_status s = require_args(params && out)) return s;
  return guarded([&] {
    const kljn::CableSpec spec = to_spec(*params);
    kljn::derive(spec); // validate before allocation
    *out = new kljn_cable{spec};
  });
}

kljn_status kljn_cable_preset(const char* name, kljn_cable** out) {
  if (kljn_status s = require_args(name && out)) return s;
  return guarded([&] { *out = new kljn_cable{kljn::preset_cable(name)}; });
}

kljn_status kljn_cable_from_json(const char* json_text, kljn_cable** out) {
  if (kljn_status s = require_args(json_text && out)) return s;
  return guarded([&] { *out = new kljn_cable{kljn::cable_from_json(json_text)}; });
}

void kljn_cable_destroy(kljn_cable* cable) { delete cable; }

kljn_status kljn_cable_get_params(const kljn_cable* cable, kljn_cable_params* out) {
  if (kljn_status s = require_args(cable && out)) return s;
  out->inductance_per_meter = cable->spec.inductance_per_meter;
  out->capacitance_per_meter = cable->spec.capacitance_per_meter;
  out->resistance_per_meter = cable->spec.resistance_per_meter;
  out->length = cable->spec.length;
  return KLJN_OK;
}

kljn_status kljn_cable_derive(const kljn_cable* cable, kljn_cable_info* out) {
  if (kljn_status s = require_args(cable && out)) return s;
  return guarded([&] {
    const kljn::CableDerived d = kljn::derive(cable->spec);
    out->total_inductance = d.total_inductance;
    out->total_capacitance = d.total_capacitance;
    out->total_resistance = d.total_resistance;
    out->wave_velocity = d.wave_velocity;
    out->wave_impedance = d.wave_impedance;
    out->min_wave_frequency = d.min_wave_frequency;
  });
}

kljn_status kljn_cable_quasi_static(const kljn_cable* cable, double frequency,
                                    double margin, int* admissible, double* ratio) {
  if (kljn_status s = require_args(cable && admissible && ratio)) return s;
  return guarded([&] {
    const kljn::QuasiStaticVerdict v = kljn::quasi_static_verdict(
        cable->spec, frequency, margin > 0.0 ? margin : 0.01);
    *admissible = v.admissible ? 1 : 0;
    *ratio = v.ratio;
  });
}

kljn_status kljn_cable_mode_frequencies(const kljn_cable* cable, int n_max,
                                        double* out_frequencies) {
  if (kljn_status s = require_args(cable && out_frequencies)) return s;
  return guarded([&] {
    const std::vector<double> modes = kljn::mode_frequencies(cable->spec, n_max);
    std::memcpy(out_frequencies, modes.data(), modes.size() * sizeof(double));
  });
}

/* ------------------------------------------------------- wave reference */

kljn_status kljn_forbidden_band(const kljn_cable* cable, double cutoff, double* ratio,
                                int* mode_count) {
  if (kljn_status s = require_args(cable && ratio && mode_count)) return s;
  return guarded([&] {
    const kljn::ForbiddenBandReport r = kljn::forbidden_band_report(cable->spec, cutoff);
    *ratio = r.ratio;
    *mode_count = r.mode_count_below_cutoff;
  });
}

kljn_status kljn_input_impedance(const kljn_cable* cable, double load, double frequency,
                                 double* re, double* im) {
  if (kljn_status s = require_args(cable && re && im)) return s;
  return guarded([&] {
    const std::complex<double> z = kljn::input_impedance(cable->spec, load, frequency);
    *re = z.real();
    *im = z.imag();
  });
}

kljn_status kljn_shorted_resonances(const kljn_cable* cable, int n_max,
                                    double* out_frequencies) {
  if (kljn_status s = require_args(cable && out_frequencies)) return s;
  return guarded([&] {
    const std::vector<double> roots = kljn::shorted_line_resonances(cable->spec, n_max);
    std::memcpy(out_frequencies, roots.data(), roots.size() * sizeof(double));
  });
}

kljn_status kljn_fit_single_velocity(double tau_toward_bob, double tau_toward_alice,
                                     double length, double* velocity, double* residual) {
  if (kljn_status s = require_args(velocity && residual)) return s;
  return guarded([&] {
    const kljn::VelocityFit fit =
        kljn::fit_single_velocity(tau_toward_bob, tau_toward_alice, length);
    *velocity = fit.velocity;
    *residual = fit.residual;
  });
}

/* ----------------------------------------------------------- ac network */

kljn_status kljn_solve_phasor(kljn_topology topology, int segment_count,
                              const kljn_cable* cable, const kljn_termination* termination,
                              double frequency, kljn_phasor_solution* out) {
  if (kljn_status s = require_args(cable && termination && out)) return s;
  return guarded([&] {
    const kljn::PhasorSolution sol =
        kljn::solve_phasor(to_model(topology, segment_count), cable->spec,
                           to_termination(*termination), frequency);
    out->frequency = sol.frequency;
    out->voltage_alice_end_re = sol.voltage_alice_end.real();
    out->voltage_alice_end_im = sol.voltage_alice_end.imag();
    out->voltage_bob_end_re = sol.voltage_bob_end.real();
    out->voltage_bob_end_im = sol.voltage_bob_end.imag();
    out->drop_u_ab_re = sol.drop_u_ab.real();
    out->drop_u_ab_im = sol.drop_u_ab.imag();
    out->loop_current_re = sol.loop_current.real();
    out->loop_current_im = sol.loop_current.imag();
  });
}

kljn_status kljn_phase_shift(kljn_topology topology, int segment_count,
                             const kljn_cable* cable, const kljn_termination* termination,
                             double frequency, kljn_direction direction, double* phase) {
  if (kljn_status s = require_args(cable && termination && phase)) return s;
  return guarded([&] {
    *phase = kljn::phase_shift(to_model(topology, segment_count), cable->spec,
                               to_termination(*termination), frequency,
                               to_direction(direction));
  });
}

kljn_status kljn_time_delay(const kljn_cable* cable, const kljn_termination* termination,
                            kljn_direction direction, double* tau) {
  if (kljn_status s = require_args(cable && termination && tau)) return s;
  return guarded([&] {
    *tau = kljn::time_delay(cable->spec, to_termination(*termination),
                            to_direction(direction));
  });
}

kljn_status kljn_phase_velocity(kljn_topology topology, int segment_count,
                                const kljn_cable* cable,
                                const kljn_termination* termination, double frequency,
                                kljn_direction direction, double* velocity) {
  if (kljn_status s = require_args(cable && termination && velocity)) return s;
  return guarded([&] {
    *velocity = kljn::equivalent_phase_velocity(
        to_model(topology, segment_count), cable->spec, to_termination(*termination),
        frequency, to_direction(direction));
  });
}

kljn_status kljn_ac_sweep(kljn_topology topology, int segment_count, const kljn_cable* cable,
                          const kljn_termination* termination, double f_start, double f_stop,
                          int points_per_decade, kljn_sweep** out) {
  if (kljn_status s = require_args(cable && termination && out)) return s;
  return guarded([&] {
    *out = new kljn_sweep{kljn::ac_sweep(to_model(topology, segment_count), cable->spec,
                                         to_termination(*termination), f_start, f_stop,
                                         points_per_decade)};
  });
}

size_t kljn_sweep_size(const kljn_sweep* sweep) { return sweep ? sweep->rows.size() : 0; }

kljn_status kljn_sweep_get(const kljn_sweep* sweep, size_t index, kljn_sweep_row* out) {
  if (kljn_status s = require_args(sweep && out)) return s;
  if (index >= sweep->rows.size())
    return fail(KLJN_ERR_VALIDATION, "sweep row index out of range");
  const kljn::SweepRow& row = sweep->rows[index];
  out->frequency = row.frequency;
  out->magnitude = row.magnitude;
  out->phase = row.phase;
  out->phase_unwrapped = row.phase_unwrapped;
  return KLJN_OK;
}

void kljn_sweep_destroy(kljn_sweep* sweep) { delete sweep; }

/* -------------------------------------------------------------- thermal */

kljn_status kljn_thermal_budget(const kljn_cable* cable, double temperature,
                                double noise_cutoff, const kljn_termination* termination,
                                int numeric_method, kljn_energy_budget* out) {
  if (kljn_status s = require_args(cable && out)) return s;
  return guarded([&] {
    kljn::ThermalConfig config;
    config.temperature = temperature;
    config.noise_cutoff = noise_cutoff;
    if (termination) config.termination = to_termination(*termination);
    const kljn::EnergyBudget b = kljn::thermal_energies(
        cable->spec, config,
        numeric_method ? kljn::ThermalMethod::NumericIntegral
                       : kljn::ThermalMethod::ClosedForm);
    out->electric_energy = b.electric_energy;
    out->magnetic_energy = b.magnetic_energy;
    out->per_mode_quota = b.per_mode_quota;
    out->deficit_electric = b.deficit_electric;
    out->deficit_magnetic = b.deficit_magnetic;
    out->corner_electric = b.corner_electric;
    out->corner_magnetic = b.corner_magnetic;
  });
}

kljn_status kljn_energy_ratio(const kljn_cable* cable, double load_resistance,
                              double* ratio) {
  if (kljn_status s = require_args(cable && ratio)) return s;
  return guarded(
      [&] { *ratio = kljn::instantaneous_energy_ratio(cable->spec, load_resistance); });
}

kljn_status kljn_planck_intensity(double frequency, double temperature, double* intensity) {
  if (kljn_status s = require_args(intensity != nullptr)) return s;
  return guarded([&] { *intensity = kljn::planck_intensity(frequency, temperature); });
}

/* ------------------------------------------------------- KLJN protocol */

void kljn_sim_params_defaults(kljn_sim_params* out) {
  if (!out) return;
  const kljn::KljnConfig config; // struct defaults are the illustrative set
  out->r_low = config.r_low;
  out->r_high = config.r_high;
  out->noise_temperature = config.noise_temperature;
  out->noise_cutoff = config.noise_cutoff;
  out->cable.inductance_per_meter = config.cable.inductance_per_meter;
  out->cable.capacitance_per_meter = config.cable.capacitance_per_meter;
  out->cable.resistance_per_meter = config.cable.resistance_per_meter;
  out->cable.length = config.cable.length;
  out->bit_period = config.bit_period;
  out->sample_rate = config.sample_rate;
  out->rng_seed = config.rng_seed;
  out->bit_count = config.bit_count;
}

kljn_status kljn_sim_params_from_json(const char* json_text, kljn_sim_params* out) {
  if (kljn_status s = require_args(json_text && out)) return s;
  return guarded([&] {
    const kljn::KljnConfig config = kljn::config_from_json(json_text);
    out->r_low = config.r_low;
    out->r_high = config.r_high;
    out->noise_temperature = config.noise_temperature;
    out->noise_cutoff = config.noise_cutoff;
    out->cable.inductance_per_meter = config.cable.inductance_per_meter;
    out->cable.capacitance_per_meter = config.cable.capacitance_per_meter;
    out->cable.resistance_per_meter = config.cable.resistance_per_meter;
    out->cable.length = config.cable.length;
    out->bit_period = config.bit_period;
    out->sample_rate = config.sample_rate;
    out->rng_seed = config.rng_seed;
    out->bit_count = config.bit_count;
  });
}

kljn_status kljn_run_exchange(const kljn_sim_params* params, kljn_report** out) {
  if (kljn_status s = require_args(params && out)) return s;
  return guarded([&] { *out = new kljn_report{kljn::run_exchange(to_config(*params))}; });
}

size_t kljn_report_bit_count(const kljn_report* report) {
  return report ? report->report.exchanges.size() : 0;
}

kljn_status kljn_report_get_summary(const kljn_report* report, kljn_report_summary* out) {
  if (kljn_status s = require_args(report && out)) return s;
  const kljn::ExchangeReport& r = report->report;
  out->legit_error_rate = r.legit_error_rate;
  out->secure_fraction = r.secure_fraction;
  out->eve_hl_lh_pvalue = r.eve_hl_lh_pvalue;
  out->eve_ll_hh_pvalue = r.eve_ll_hh_pvalue;
  out->delay_toward_bob = r.delay_toward_bob;
  out->delay_toward_alice = r.delay_toward_alice;
  return KLJN_OK;
}

kljn_status kljn_report_get_bit(const kljn_report* report, size_t index,
                                kljn_bit_record* out) {
  if (kljn_status s = require_args(report && out)) return s;
  if (index >= report->report.exchanges.size())
    return fail(KLJN_ERR_VALIDATION, "bit index out of range");
  const kljn::BitExchange& bit = report->report.exchanges[index];
  out->alice_high = bit.alice_choice == kljn::BitChoice::High ? 1 : 0;
  out->bob_high = bit.bob_choice == kljn::BitChoice::High ? 1 : 0;
  out->alice_decoded = from_outcome(bit.alice_decoded_bob);
  out->bob_decoded = from_outcome(bit.bob_decoded_alice);
  out->secure = bit.secure ? 1 : 0;
  out->mean_square_voltage = bit.mean_square_voltage;
  out->mean_square_current = bit.mean_square_current;
  return KLJN_OK;
}

void kljn_report_destroy(kljn_report* report) { delete report; }

kljn_status kljn_delay_probe(const kljn_sim_params* params, kljn_direction direction,
                             double probe_frequency, double* tau) {
  if (kljn_status s = require_args(params && tau)) return s;
  return guarded([&] {
    *tau = kljn::delay_probe(to_config(*params), to_direction(direction), probe_frequency);
  });
}

kljn_status kljn_simulate_bit(const kljn_sim_params* params, int alice_high, int bob_high,
                              uint64_t bit_index, kljn_trace** out) {
  if (kljn_status s = require_args(params && out)) return s;
  return guarded([&] {
    *out = new kljn_trace{kljn::simulate_bit_period(
        to_config(*params), alice_high ? kljn::BitChoice::High : kljn::BitChoice::Low,
        bob_high ? kljn::BitChoice::High : kljn::BitChoice::Low, bit_index)};
  });
}

size_t kljn_trace_sample_count(const kljn_trace* trace) {
  return trace ? trace->traces.u_alice_end.size() : 0;
}

kljn_status kljn_trace_sample_rate(const kljn_trace* trace, double* out) {
  if (kljn_status s = require_args(trace && out)) return s;
  *out = trace->traces.sample_rate;
  return KLJN_OK;
}

kljn_status kljn_trace_channel(const kljn_trace* trace, int channel, const double** data) {
  if (kljn_status s = require_args(trace && data)) return s;
  switch (channel) {
  case 0: *data = trace->traces.u_alice_end.data(); return KLJN_OK;
  case 1: *data = trace->traces.u_bob_end.data(); return KLJN_OK;
  case 2: *data = trace->traces.loop_current.data(); return KLJN_OK;
  default: return fail(KLJN_ERR_VALIDATION, "trace channel must be 0, 1 or 2");
  }
}

void kljn_trace_destroy(kljn_trace* trace) { delete trace; }

} // extern "C"
