#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <kljn/kljn.h>

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

kljn_cable_params reference_params() {
  kljn_cable_params p;
  p.inductance_per_meter = 0.25e-6;
  p.capacitance_per_meter = 100.0e-12;
  p.resistance_per_meter = 0.021;
  p.length = 1.5;
  return p;
}

kljn_cable_params lossless_params() {
  kljn_cable_params p = reference_params();
  p.resistance_per_meter = 0.0;
  return p;
}

kljn_termination matched_termination() {
  kljn_termination t;
  t.resistance_alice = 50.0;
  t.resistance_bob = 50.0;
  t.drive_end = KLJN_END_ALICE;
  t.drive_amplitude = 1.0;
  return t;
}

double rel(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

/// RAII wrapper so failed REQUIREs cannot leak handles.
struct Cable {
  kljn_cable* handle = nullptr;
  Cable() = default;
  explicit Cable(const kljn_cable_params& params) {
    REQUIRE(kljn_cable_create(&params, &handle) == KLJN_OK);
  }
  Cable(const Cable&) = delete;
  Cable& operator=(const Cable&) = delete;
  ~Cable() { kljn_cable_destroy(handle); }
};

} // namespace

TEST_CASE("version and error strings are always available") {
  REQUIRE(kljn_version() != nullptr);
  CHECK(std::string(kljn_version()) == "0.1.0");
  REQUIRE(kljn_last_error() != nullptr);
}

TEST_CASE("cable lifecycle and derived quantities") {
  const kljn_cable_params params = reference_params();
  Cable cable;
  REQUIRE(kljn_cable_create(&params, &cable.handle) == KLJN_OK);

  kljn_cable_params round_trip;
  REQUIRE(kljn_cable_get_params(cable.handle, &round_trip) == KLJN_OK);
  CHECK(round_trip.inductance_per_meter == params.inductance_per_meter);
  CHECK(round_trip.capacitance_per_meter == params.capacitance_per_meter);
  CHECK(round_trip.resistance_per_meter == params.resistance_per_meter);
  CHECK(round_trip.length == params.length);

  kljn_cable_info info;
  REQUIRE(kljn_cable_derive(cable.handle, &info) == KLJN_OK);
  CHECK(rel(info.total_inductance, 0.375e-6) < 1e-12);
  CHECK(rel(info.total_capacitance, 150.0e-12) < 1e-12);
  CHECK(rel(info.total_resistance, 0.0315) < 1e-12);
  CHECK(rel(info.wave_velocity, 2.0e8) < 1e-12);
  CHECK(rel(info.wave_impedance, 50.0) < 1e-12);
  CHECK(rel(info.min_wave_frequency, 2.0e8 / 3.0) < 1e-12);

  kljn_cable_destroy(nullptr); // must be a no-op
}

TEST_CASE("invalid cables and null arguments map to distinct statuses") {
  kljn_cable_params bad = reference_params();
  bad.inductance_per_meter = -1.0;
  kljn_cable* cable = nullptr;
  CHECK(kljn_cable_create(&bad, &cable) == KLJN_ERR_VALIDATION);
  CHECK(cable == nullptr);
  CHECK(std::strlen(kljn_last_error()) > 0);

  const kljn_cable_params good = reference_params();
  CHECK(kljn_cable_create(&good, nullptr) == KLJN_ERR_NULL_ARGUMENT);
  CHECK(kljn_cable_create(nullptr, &cable) == KLJN_ERR_NULL_ARGUMENT);
  kljn_cable_info info;
  CHECK(kljn_cable_derive(nullptr, &info) == KLJN_ERR_NULL_ARGUMENT);
}

TEST_CASE("presets and JSON construction") {
  Cable preset;
  REQUIRE(kljn_cable_preset("rg58-1m5", &preset.handle) == KLJN_OK);
  kljn_cable_info info;
  REQUIRE(kljn_cable_derive(preset.handle, &info) == KLJN_OK);
  CHECK(rel(info.wave_impedance, 50.0) < 1e-12);

  kljn_cable* missing = nullptr;
  CHECK(kljn_cable_preset("definitely-not-a-preset", &missing) == KLJN_ERR_VALIDATION);

  Cable parsed;
  REQUIRE(kljn_cable_from_json(
              R"({"l_per_m": 0.25e-6, "c_per_m": 100e-12, "r_per_m": 0.0, "length_m": 3.0})",
              &parsed.handle) == KLJN_OK);
  kljn_cable_params params;
  REQUIRE(kljn_cable_get_params(parsed.handle, &params) == KLJN_OK);
  CHECK(params.length == 3.0);

  kljn_cable* bad = nullptr;
  CHECK(kljn_cable_from_json("{not json", &bad) == KLJN_ERR_VALIDATION);
}

TEST_CASE("quasi-static verdict honours the margin argument") {
  Cable cable(reference_params());
  const double f_min = 2.0e8 / 3.0;

  int admissible = -1;
  double ratio = -1.0;
  REQUIRE(kljn_cable_quasi_static(cable.handle, 1.0e3, 0.0, &admissible, &ratio) == KLJN_OK);
  CHECK(admissible == 1);
  CHECK(rel(ratio, 1.0e3 / f_min) < 1e-12);

  // 2% of f_min: inadmissible under the default 1% margin, admissible
  // when the caller relaxes the margin to 50%.
  REQUIRE(kljn_cable_quasi_static(cable.handle, 0.02 * f_min, 0.0, &admissible, &ratio) ==
          KLJN_OK);
  CHECK(admissible == 0);
  REQUIRE(kljn_cable_quasi_static(cable.handle, 0.02 * f_min, 0.5, &admissible, &ratio) ==
          KLJN_OK);
  CHECK(admissible == 1);
}

TEST_CASE("mode frequencies fill the caller's buffer") {
  Cable cable(reference_params());
  double modes[5] = {0, 0, 0, 0, 0};
  REQUIRE(kljn_cable_mode_frequencies(cable.handle, 5, modes) == KLJN_OK);
  const double f_min = 2.0e8 / 3.0;
  for (int n = 1; n <= 5; ++n) CHECK(rel(modes[n - 1], n * f_min) < 1e-12);
  CHECK(kljn_cable_mode_frequencies(cable.handle, 0, modes) == KLJN_ERR_VALIDATION);
}

TEST_CASE("forbidden band counts admitted modes") {
  Cable cable(reference_params());
  double ratio = -1.0;
  int mode_count = -1;
  REQUIRE(kljn_forbidden_band(cable.handle, 5.0e3, &ratio, &mode_count) == KLJN_OK);
  CHECK(mode_count == 0);
  CHECK(rel(ratio, 5.0e3 / (2.0e8 / 3.0)) < 1e-12);

  REQUIRE(kljn_forbidden_band(cable.handle, 1.5e8, &ratio, &mode_count) == KLJN_OK);
  CHECK(mode_count == 2);
}

TEST_CASE("wave oracle functions through the C boundary") {
  Cable cable(lossless_params());

  double re = 0.0, im = 0.0;
  REQUIRE(kljn_input_impedance(cable.handle, 50.0, 1.0e6, &re, &im) == KLJN_OK);
  CHECK(std::abs(re - 50.0) < 1e-9);
  CHECK(std::abs(im) < 1e-9);

  double resonances[3] = {0, 0, 0};
  REQUIRE(kljn_shorted_resonances(cable.handle, 3, resonances) == KLJN_OK);
  const double f_min = 2.0e8 / 3.0;
  for (int n = 1; n <= 3; ++n) CHECK(rel(resonances[n - 1], n * f_min) < 1e-6);

  // The oracle refuses lossy cables.
  Cable lossy(reference_params());
  CHECK(kljn_input_impedance(lossy.handle, 50.0, 1.0e6, &re, &im) == KLJN_ERR_VALIDATION);

  double velocity = 0.0, residual = 0.0;
  REQUIRE(kljn_fit_single_velocity(2.0e-9, 4.0e-9, 1.5, &velocity, &residual) == KLJN_OK);
  CHECK(rel(velocity, 1.5 / 3.0e-9) < 1e-12);
  CHECK(rel(residual, 1.0e-9) < 1e-12);
}

TEST_CASE("phasor solve, phase shift and phase velocity are consistent") {
  Cable cable(reference_params());
  kljn_termination term;
  term.resistance_alice = 1.0e3;
  term.resistance_bob = 1.0e4;
  term.drive_end = KLJN_END_ALICE;
  term.drive_amplitude = 1.0;
  const double f = 5.0e3;

  kljn_phasor_solution sol;
  REQUIRE(kljn_solve_phasor(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.handle, &term, f, &sol) ==
          KLJN_OK);
  // Hand solve of the single loop U / (R_A + R_B + jwL).
  const double omega = 2.0 * kPi * f;
  const double l_c = 0.375e-6;
  const double denom = 1.1e4 * 1.1e4 + omega * l_c * omega * l_c;
  const double i_re = 1.1e4 / denom;
  const double i_im = -omega * l_c / denom;
  CHECK(std::abs(sol.loop_current_re - i_re) < 1e-12);
  CHECK(std::abs(sol.loop_current_im - i_im) < 1e-12);
  CHECK(std::abs(sol.voltage_bob_end_re - i_re * 1.0e4) < 1e-9);
  CHECK(std::abs(sol.drop_u_ab_re - (sol.voltage_alice_end_re - sol.voltage_bob_end_re)) <
        1e-15);

  double phase = 0.0;
  REQUIRE(kljn_phase_shift(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.handle, &term, f,
                           KLJN_TOWARD_BOB, &phase) == KLJN_OK);
  CHECK(rel(phase, -std::atan(omega * l_c / 1.0e4)) < 1e-10);

  double velocity = 0.0;
  REQUIRE(kljn_phase_velocity(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.handle, &term, f,
                              KLJN_TOWARD_BOB, &velocity) == KLJN_OK);
  CHECK(rel(velocity, 2.0 * kPi * f * 1.5 / std::abs(phase)) < 1e-12);

  double tau = 0.0;
  REQUIRE(kljn_time_delay(cable.handle, &term, KLJN_TOWARD_BOB, &tau) == KLJN_OK);
  CHECK(rel(tau * 1.0e4, l_c) < 1e-12);
  REQUIRE(kljn_time_delay(cable.handle, &term, KLJN_TOWARD_ALICE, &tau) == KLJN_OK);
  CHECK(rel(tau * 1.0e3, l_c) < 1e-12);
}

TEST_CASE("sweep handles expose rows and reject bad indices") {
  Cable cable(reference_params());
  const kljn_termination term = matched_termination();

  kljn_sweep* sweep = nullptr;
  REQUIRE(kljn_ac_sweep(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.handle, &term, 100.0, 1.0e7, 20,
                        &sweep) == KLJN_OK);
  REQUIRE(sweep != nullptr);
  CHECK(kljn_sweep_size(sweep) == 101);

  kljn_sweep_row row;
  REQUIRE(kljn_sweep_get(sweep, 0, &row) == KLJN_OK);
  CHECK(rel(row.frequency, 100.0) < 1e-12);
  CHECK(row.magnitude > 0.0);
  REQUIRE(kljn_sweep_get(sweep, 100, &row) == KLJN_OK);
  CHECK(rel(row.frequency, 1.0e7) < 1e-9);
  CHECK(kljn_sweep_get(sweep, 101, &row) == KLJN_ERR_VALIDATION);
  kljn_sweep_destroy(sweep);
  kljn_sweep_destroy(nullptr);

  CHECK(kljn_sweep_size(nullptr) == 0);
  kljn_sweep* bad = nullptr;
  CHECK(kljn_ac_sweep(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.handle, &term, 1.0e7, 100.0, 20,
                      &bad) == KLJN_ERR_VALIDATION);
}

TEST_CASE("thermal budget defaults to the matched termination") {
  Cable cable(reference_params());

  kljn_energy_budget matched, explicit_matched, numeric;
  REQUIRE(kljn_thermal_budget(cable.handle, 300.0, 5.0e3, nullptr, 0, &matched) == KLJN_OK);
  const kljn_termination term = matched_termination();
  REQUIRE(kljn_thermal_budget(cable.handle, 300.0, 5.0e3, &term, 0, &explicit_matched) ==
          KLJN_OK);
  CHECK(matched.electric_energy == explicit_matched.electric_energy);
  CHECK(matched.magnetic_energy == explicit_matched.magnetic_energy);
  CHECK(rel(matched.electric_energy, matched.magnetic_energy) < 1e-14);
  CHECK(rel(matched.corner_electric, matched.corner_magnetic) < 1e-14);

  REQUIRE(kljn_thermal_budget(cable.handle, 300.0, 5.0e3, nullptr, 1, &numeric) == KLJN_OK);
  CHECK(rel(numeric.electric_energy, matched.electric_energy) < 1e-10);

  CHECK(kljn_thermal_budget(cable.handle, 0.0, 5.0e3, nullptr, 0, &matched) ==
        KLJN_ERR_VALIDATION);

  double ratio = 0.0;
  REQUIRE(kljn_energy_ratio(cable.handle, 50.0, &ratio) == KLJN_OK);
  CHECK(ratio == 1.0);
  REQUIRE(kljn_energy_ratio(cable.handle, 100.0, &ratio) == KLJN_OK);
  CHECK(rel(ratio, 4.0) < 1e-12);

  double intensity = 0.0;
  REQUIRE(kljn_planck_intensity(1.0e9, 300.0, &intensity) == KLJN_OK);
  const double c = 2.99792458e8;
  const double rj = 4.0 * kPi * 1.0e18 * 1.380649e-23 * 300.0 / (c * c);
  CHECK(rel(intensity, rj) < 1e-3);
}

TEST_CASE("simulation parameter defaults and JSON parsing") {
  kljn_sim_params params;
  kljn_sim_params_defaults(&params);
  CHECK(params.r_low == 1.0e3);
  CHECK(params.r_high == 1.0e4);
  CHECK(params.noise_temperature == 1.0e15);
  CHECK(params.noise_cutoff == 5.0e3);
  CHECK(params.cable.length == 1.5);
  CHECK(params.bit_period == 0.4);
  CHECK(params.sample_rate == 1.0e5);
  CHECK(params.rng_seed == 42);
  CHECK(params.bit_count == 1000);

  kljn_sim_params parsed;
  REQUIRE(kljn_sim_params_from_json(R"({"r_low": 2000.0, "bit_count": 5})", &parsed) ==
          KLJN_OK);
  CHECK(parsed.r_low == 2000.0);
  CHECK(parsed.bit_count == 5);
  CHECK(parsed.r_high == 1.0e4);

  CHECK(kljn_sim_params_from_json(R"({"nope": 1})", &parsed) == KLJN_ERR_VALIDATION);
  CHECK(kljn_sim_params_from_json("{", &parsed) == KLJN_ERR_VALIDATION);
}

TEST_CASE("a short protocol run exposes records, traces and delays") {
  kljn_sim_params params;
  kljn_sim_params_defaults(&params);
  params.bit_period = 0.1;
  params.bit_count = 8;
  params.rng_seed = 11;

  kljn_report* report = nullptr;
  REQUIRE(kljn_run_exchange(&params, &report) == KLJN_OK);
  REQUIRE(report != nullptr);
  CHECK(kljn_report_bit_count(report) == 8);

  kljn_report_summary summary;
  REQUIRE(kljn_report_get_summary(report, &summary) == KLJN_OK);
  CHECK(summary.legit_error_rate == 0.0);
  CHECK(summary.secure_fraction >= 0.0);
  CHECK(summary.secure_fraction <= 1.0);
  CHECK(summary.eve_hl_lh_pvalue >= 0.0);
  CHECK(summary.eve_hl_lh_pvalue <= 1.0);
  CHECK(summary.delay_toward_bob > summary.delay_toward_alice);

  kljn_bit_record record;
  for (size_t i = 0; i < 8; ++i) {
    REQUIRE(kljn_report_get_bit(report, i, &record) == KLJN_OK);
    CHECK(record.secure == (record.alice_high != record.bob_high));
    CHECK(record.mean_square_voltage > 0.0);
    CHECK(record.mean_square_current > 0.0);
    CHECK(record.alice_decoded >= 0);
    CHECK(record.alice_decoded <= 2);
  }
  CHECK(kljn_report_get_bit(report, 8, &record) == KLJN_ERR_VALIDATION);

  // Re-simulating the same indexed bit reproduces its recorded power.
  REQUIRE(kljn_report_get_bit(report, 3, &record) == KLJN_OK);
  kljn_trace* trace = nullptr;
  REQUIRE(kljn_simulate_bit(&params, record.alice_high, record.bob_high, 3, &trace) ==
          KLJN_OK);
  REQUIRE(trace != nullptr);
  CHECK(kljn_trace_sample_count(trace) == 10000);
  double rate = 0.0;
  REQUIRE(kljn_trace_sample_rate(trace, &rate) == KLJN_OK);
  CHECK(rate == 1.0e5);

  const double* samples = nullptr;
  REQUIRE(kljn_trace_channel(trace, 0, &samples) == KLJN_OK);
  double acc = 0.0;
  for (size_t i = 0; i < 10000; ++i) acc += samples[i] * samples[i];
  CHECK(acc / 10000.0 == record.mean_square_voltage);
  CHECK(kljn_trace_channel(trace, 3, &samples) == KLJN_ERR_VALIDATION);
  kljn_trace_destroy(trace);
  kljn_trace_destroy(nullptr);
  kljn_report_destroy(report);
  kljn_report_destroy(nullptr);

  // The standalone probe agrees with the wave-free delay law.
  double tau = 0.0;
  REQUIRE(kljn_delay_probe(&params, KLJN_TOWARD_BOB, 0.0, &tau) == KLJN_OK);
  CHECK(rel(tau * params.r_low, 0.375e-6) < 0.02);

  kljn_report* null_report = nullptr;
  CHECK(kljn_run_exchange(nullptr, &null_report) == KLJN_ERR_NULL_ARGUMENT);
}
