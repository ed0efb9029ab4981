/// kljn_cli -- command-line front end over the kljn shared library.
///
/// Every subcommand resolves its arguments to plain SI numbers, runs the
/// analysis, and writes its outputs atomically (temp file + rename) into
/// --output-dir, together with a run manifest recording the resolved
/// parameters.  `kljn_cli rerun <manifest>` re-executes a manifest and
/// reproduces the outputs byte-for-byte under the same tool version.
///
/// Exit codes: 0 success, 2 validation/usage error, 3 numeric failure.

#include <kljn/kljn.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Failure carrying the process exit code (2 validation, 3 numeric).
struct CliError : std::runtime_error {
  int exit_code;
  CliError(int code, std::string message)
      : std::runtime_error(std::move(message)), exit_code(code) {}
};

[[noreturn]] void fail_validation(const std::string& message) {
  throw CliError(2, message);
}

int exit_code_of(kljn_status status) {
  switch (status) {
  case KLJN_OK:
    return 0;
  case KLJN_ERR_VALIDATION:
  case KLJN_ERR_NULL_ARGUMENT:
    return 2;
  case KLJN_ERR_NUMERIC:
    return 3;
  default:
    return 3;
  }
}

void check(kljn_status status) {
  if (status != KLJN_OK) throw CliError(exit_code_of(status), kljn_last_error());
}

/// RAII wrappers for the opaque library handles.
struct Cable {
  kljn_cable* ptr = nullptr;
  Cable() = default;
  Cable(const Cable&) = delete;
  Cable& operator=(const Cable&) = delete;
  Cable(Cable&& other) noexcept : ptr(std::exchange(other.ptr, nullptr)) {}
  Cable& operator=(Cable&& other) noexcept {
    std::swap(ptr, other.ptr);
    return *this;
  }
  ~Cable() { kljn_cable_destroy(ptr); }
};

struct Sweep {
  kljn_sweep* ptr = nullptr;
  ~Sweep() { kljn_sweep_destroy(ptr); }
  Sweep() = default;
  Sweep(const Sweep&) = delete;
  Sweep& operator=(const Sweep&) = delete;
};

struct Report {
  kljn_report* ptr = nullptr;
  ~Report() { kljn_report_destroy(ptr); }
  Report() = default;
  Report(const Report&) = delete;
  Report& operator=(const Report&) = delete;
};

struct Trace {
  kljn_trace* ptr = nullptr;
  ~Trace() { kljn_trace_destroy(ptr); }
  Trace() = default;
  Trace(const Trace&) = delete;
  Trace& operator=(const Trace&) = delete;
};

/* ------------------------------------------------ engineering suffixes */

/// Parses "2.5k", "100p", "0.25u", "1µ", or a plain number.  The suffix
/// scales by the usual engineering powers of ten; anything else is
/// rejected.  The library itself is strict SI -- expansion happens here.
double parse_engineering(const std::string& text, const std::string& what) {
  std::string s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.empty()) fail_validation(what + ": empty value");

  const char* begin = s.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin)
    fail_validation(what + ": '" + text + "' is not a number");

  const std::string suffix(end);
  double scale = 1.0;
  if (!suffix.empty()) {
    if (suffix == "k")
      scale = 1e3;
    else if (suffix == "M")
      scale = 1e6;
    else if (suffix == "G")
      scale = 1e9;
    else if (suffix == "m")
      scale = 1e-3;
    else if (suffix == "u" || suffix == "\xce\xbc" || suffix == "\xc2\xb5")
      scale = 1e-6;
    else if (suffix == "n")
      scale = 1e-9;
    else if (suffix == "p")
      scale = 1e-12;
    else
      fail_validation(what + ": unrecognized engineering suffix '" + suffix +
                      "' (expected one of k, M, G, m, u, n, p)");
  }
  return value * scale;
}

/// A numeric CLI option that accepts engineering suffixes; parsed lazily
/// so error messages can name the flag.
struct EngValue {
  std::string text;
  bool present = false;
};

CLI::Option* add_eng(CLI::App* sub, const std::string& name, EngValue& slot,
                     const std::string& description) {
  return sub->add_option_function<std::string>(
      name,
      [&slot](const std::string& value) {
        slot.text = value;
        slot.present = true;
      },
      description);
}

double eng_required(const EngValue& v, const char* flag) {
  return parse_engineering(v.text, flag);
}

double eng_or(const EngValue& v, const char* flag, double fallback) {
  return v.present ? parse_engineering(v.text, flag) : fallback;
}

/* ------------------------------------------------------- file plumbing */

/// Writes bytes to `path` atomically: temp file in the same directory,
/// then rename.  Readers never observe a half-written file.
void atomic_write(const fs::path& path, const std::string& bytes) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw CliError(3, "cannot open '" + tmp.string() + "' for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    os.flush();
    if (!os) throw CliError(3, "write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, path);
}

std::string format_row(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

std::string format_row(const char* fmt, double a, double b, double c, double d) {
  char buf[200];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
  return buf;
}

/* ----------------------------------------------------- cable arguments */

struct CableArgs {
  std::string preset;
  EngValue inductance, capacitance, resistance, length;
};

void add_cable_options(CLI::App* sub, CableArgs& args) {
  sub->add_option("--preset", args.preset, "Cable preset name (rg58-1m5)");
  add_eng(sub, "--l-per-m", args.inductance, "Inductance per meter [H/m]");
  add_eng(sub, "--c-per-m", args.capacitance, "Capacitance per meter [F/m]");
  add_eng(sub, "--r-per-m", args.resistance, "Series resistance per meter [ohm/m]");
  add_eng(sub, "--length", args.length, "Cable length [m]");
}

/// Resolves preset + overrides into a plain-number cable object.
json resolve_cable(const CableArgs& args) {
  double l = 0.0, c = 0.0, r = 0.0, len = 0.0;
  bool have_base = false;
  if (!args.preset.empty()) {
    Cable cable;
    check(kljn_cable_preset(args.preset.c_str(), &cable.ptr));
    kljn_cable_params p;
    check(kljn_cable_get_params(cable.ptr, &p));
    l = p.inductance_per_meter;
    c = p.capacitance_per_meter;
    r = p.resistance_per_meter;
    len = p.length;
    have_base = true;
  }
  if (args.inductance.present) l = eng_required(args.inductance, "--l-per-m");
  if (args.capacitance.present) c = eng_required(args.capacitance, "--c-per-m");
  if (args.resistance.present) r = eng_required(args.resistance, "--r-per-m");
  if (args.length.present) len = eng_required(args.length, "--length");
  if (!have_base &&
      !(args.inductance.present && args.capacitance.present && args.length.present))
    fail_validation("cable underspecified: give --preset, or all of "
                    "--l-per-m, --c-per-m and --length (--r-per-m defaults to 0)");
  return json{{"l_per_m", l}, {"c_per_m", c}, {"r_per_m", r}, {"length_m", len}};
}

Cable make_cable(const json& cable_json) {
  Cable cable;
  check(kljn_cable_from_json(cable_json.dump().c_str(), &cable.ptr));
  return cable;
}

/* ------------------------------------------------- KLJN config loading */

double expand_number(const json& value, const std::string& key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_engineering(value.get<std::string>(), key);
  fail_validation(key + ": must be a number or an engineering-suffix string");
}

json expand_integer(const json& value, const std::string& key) {
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_string()) {
    const double expanded = parse_engineering(value.get<std::string>(), key);
    const auto rounded = static_cast<std::int64_t>(std::llround(expanded));
    if (static_cast<double>(rounded) != expanded)
      fail_validation(key + ": must be an integer");
    return rounded;
  }
  fail_validation(key + ": must be an integer or an engineering-suffix string");
}

/// Loads a user config file (if given), expands engineering-suffix
/// strings, and merges it over the library defaults so every field is
/// present and numeric.  Field validation itself stays in the library.
json resolve_config(const std::optional<std::string>& config_path) {
  kljn_sim_params d;
  kljn_sim_params_defaults(&d);
  json config = {
      {"r_low", d.r_low},
      {"r_high", d.r_high},
      {"noise_temperature", d.noise_temperature},
      {"noise_cutoff", d.noise_cutoff},
      {"cable",
       {{"l_per_m", d.cable.inductance_per_meter},
        {"c_per_m", d.cable.capacitance_per_meter},
        {"r_per_m", d.cable.resistance_per_meter},
        {"length_m", d.cable.length}}},
      {"bit_period", d.bit_period},
      {"sample_rate", d.sample_rate},
      {"rng_seed", d.rng_seed},
      {"bit_count", d.bit_count}};
  if (!config_path) return config;

  std::ifstream is(*config_path, std::ios::binary);
  if (!is) fail_validation("cannot open config file '" + *config_path + "'");
  json user;
  try {
    user = json::parse(is);
  } catch (const json::parse_error& e) {
    fail_validation(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!user.is_object()) fail_validation("config file must hold a JSON object");

  for (const auto& [key, value] : user.items()) {
    if (key == "cable") {
      if (!value.is_object()) fail_validation("cable: must be an object");
      for (const auto& [cable_key, cable_value] : value.items()) {
        if (!config["cable"].contains(cable_key))
          fail_validation("cable." + cable_key + ": unknown key");
        config["cable"][cable_key] = expand_number(cable_value, "cable." + cable_key);
      }
    } else if (key == "rng_seed" || key == "bit_count") {
      config[key] = expand_integer(value, key);
    } else {
      // Unknown keys are expanded too and then rejected by the library
      // with a field-level message.
      config[key] = expand_number(value, key);
    }
  }
  return config;
}

kljn_sim_params params_from_config(const json& config) {
  kljn_sim_params p;
  check(kljn_sim_params_from_json(config.dump().c_str(), &p));
  return p;
}

/* -------------------------------------------------- command execution */

struct OutputFile {
  std::string name;
  std::string bytes;
};

json exec_cable_info(const json& params, std::vector<OutputFile>& outputs) {
  Cable cable = make_cable(params.at("cable"));
  kljn_cable_info info;
  check(kljn_cable_derive(cable.ptr, &info));
  const json out = {{"cable", params.at("cable")},
                    {"derived",
                     {{"total_inductance_h", info.total_inductance},
                      {"total_capacitance_f", info.total_capacitance},
                      {"total_resistance_ohm", info.total_resistance},
                      {"wave_velocity_m_per_s", info.wave_velocity},
                      {"wave_impedance_ohm", info.wave_impedance},
                      {"min_wave_frequency_hz", info.min_wave_frequency}}}};
  outputs.push_back({"cable_info.json", out.dump(2) + "\n"});
  return out;
}

json exec_wave_check(const json& params, std::vector<OutputFile>& outputs) {
  Cable cable = make_cable(params.at("cable"));
  const double cutoff = params.at("fc").get<double>();
  double ratio = 0.0;
  int mode_count = 0;
  check(kljn_forbidden_band(cable.ptr, cutoff, &ratio, &mode_count));
  kljn_cable_info info;
  check(kljn_cable_derive(cable.ptr, &info));
  const json out = {{"cutoff_hz", cutoff},
                    {"min_wave_frequency_hz", info.min_wave_frequency},
                    {"ratio", ratio},
                    {"mode_count_below_cutoff", mode_count}};
  outputs.push_back({"wave_check.json", out.dump(2) + "\n"});
  return out;
}

kljn_topology topology_of(const std::string& model) {
  if (model == "lossless") return KLJN_TOPOLOGY_LOSSLESS_L;
  if (model == "lossy") return KLJN_TOPOLOGY_LOSSY_RL;
  if (model == "pi") return KLJN_TOPOLOGY_PI_RLC;
  if (model == "ladder") return KLJN_TOPOLOGY_LADDER_N;
  fail_validation("unknown model '" + model + "' (expected lossless|lossy|pi|ladder[:N])");
}

json exec_ac_sweep(const json& params, std::vector<OutputFile>& outputs) {
  Cable cable = make_cable(params.at("cable"));
  const std::string model = params.at("model").get<std::string>();
  const int segments = params.value("segments", 0);
  const kljn_termination term = {
      params.at("ra").get<double>(), params.at("rb").get<double>(),
      params.at("drive_end").get<std::string>() == "bob" ? KLJN_END_BOB : KLJN_END_ALICE,
      params.at("amplitude").get<double>()};
  const double f_start = params.at("f_start").get<double>();
  const double f_stop = params.at("f_stop").get<double>();
  const int ppd = params.at("points_per_decade").get<int>();

  kljn_cable_info info;
  check(kljn_cable_derive(cable.ptr, &info));
  if (f_stop > info.min_wave_frequency)
    std::cerr << "warning: sweep extends above f_min = " << info.min_wave_frequency
              << " Hz where the lumped models lose validity\n";

  Sweep sweep;
  check(kljn_ac_sweep(topology_of(model), segments, cable.ptr, &term, f_start, f_stop,
                      ppd, &sweep.ptr));
  const std::size_t n = kljn_sweep_size(sweep.ptr);

  const bool as_json = params.at("format").get<std::string>() == "json";
  if (as_json) {
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      kljn_sweep_row row;
      check(kljn_sweep_get(sweep.ptr, i, &row));
      rows.push_back({{"freq_hz", row.frequency},
                      {"mag_uab_v", row.magnitude},
                      {"phase_deg", row.phase * 180.0 / kPi},
                      {"phase_unwrapped_deg", row.phase_unwrapped * 180.0 / kPi}});
    }
    outputs.push_back({"ac_sweep.json", rows.dump(2) + "\n"});
  } else {
    std::string csv = "freq_hz,mag_uab_v,phase_deg,phase_unwrapped_deg\n";
    for (std::size_t i = 0; i < n; ++i) {
      kljn_sweep_row row;
      check(kljn_sweep_get(sweep.ptr, i, &row));
      csv += format_row("%.12g,%.12g,%.12g,%.12g\n", row.frequency, row.magnitude,
                        row.phase * 180.0 / kPi, row.phase_unwrapped * 180.0 / kPi);
    }
    outputs.push_back({"ac_sweep.csv", std::move(csv)});
  }
  return json();
}

json exec_phase_velocity_table(const json& params, std::vector<OutputFile>& outputs) {
  Cable cable = make_cable(params.at("cable"));
  kljn_cable_info info;
  check(kljn_cable_derive(cable.ptr, &info));

  const double resistances[] = {10.0, 20.0, 50.0, 1e3, 10e3};
  const double frequencies[] = {1e3, 5e3};
  const bool as_json = params.at("format").get<std::string>() == "json";
  json rows = json::array();
  std::string csv = "r_ohm,f_hz,v_m_per_s\n";
  for (double r : resistances) {
    for (double f : frequencies) {
      const kljn_termination term = {info.wave_impedance, r, KLJN_END_ALICE, 1.0};
      double velocity = 0.0;
      check(kljn_phase_velocity(KLJN_TOPOLOGY_LOSSLESS_L, 0, cable.ptr, &term, f,
                                KLJN_TOWARD_BOB, &velocity));
      if (as_json)
        rows.push_back({{"r_ohm", r}, {"f_hz", f}, {"v_m_per_s", velocity}});
      else
        csv += format_row("%.12g,%.12g,%.12g\n", r, f, velocity);
    }
  }
  if (as_json)
    outputs.push_back({"phase_velocity.json", rows.dump(2) + "\n"});
  else
    outputs.push_back({"phase_velocity.csv", std::move(csv)});
  return json();
}

json exec_thermal_budget(const json& params, std::vector<OutputFile>& outputs) {
  Cable cable = make_cable(params.at("cable"));
  const bool matched = params.at("matched").get<bool>();
  kljn_termination term = {};
  const kljn_termination* term_ptr = nullptr;
  if (!matched) {
    term = {params.at("ra").get<double>(), params.at("rb").get<double>(),
            KLJN_END_ALICE, 1.0};
    term_ptr = &term;
  }
  const std::string method = params.at("method").get<std::string>();
  kljn_energy_budget budget;
  check(kljn_thermal_budget(cable.ptr, params.at("temperature").get<double>(),
                            params.at("noise_cutoff").get<double>(), term_ptr,
                            method == "numeric" ? 1 : 0, &budget));
  const json out = {{"e_e_j", budget.electric_energy},
                    {"e_m_j", budget.magnetic_energy},
                    {"quota_j", budget.per_mode_quota},
                    {"deficit_e", budget.deficit_electric},
                    {"deficit_m", budget.deficit_magnetic},
                    {"f0c_hz", budget.corner_electric},
                    {"f0l_hz", budget.corner_magnetic},
                    {"method", method}};
  outputs.push_back({"thermal_budget.json", out.dump(2) + "\n"});
  return out;
}

json exec_kljn_run(const json& params, std::vector<OutputFile>& outputs) {
  const json& config = params.at("config");
  const kljn_sim_params p = params_from_config(config);

  Report report;
  check(kljn_run_exchange(&p, &report.ptr));
  kljn_report_summary summary;
  check(kljn_report_get_summary(report.ptr, &summary));
  const std::size_t bits = kljn_report_bit_count(report.ptr);

  const json out = {{"config", config},
                    {"bit_count", bits},
                    {"secure_fraction", summary.secure_fraction},
                    {"legit_error_rate", summary.legit_error_rate},
                    {"eve_hl_lh_pvalue", summary.eve_hl_lh_pvalue},
                    {"eve_ll_hh_pvalue", summary.eve_ll_hh_pvalue},
                    {"delay_toward_bob_s", summary.delay_toward_bob},
                    {"delay_toward_alice_s", summary.delay_toward_alice}};
  outputs.push_back({"kljn_report.json", out.dump(2) + "\n"});

  if (params.at("bits_csv").get<bool>()) {
    std::string csv = "bit,alice,bob,secure,msv_v2,msc_a2,decoded_ok\n";
    for (std::size_t i = 0; i < bits; ++i) {
      kljn_bit_record rec;
      check(kljn_report_get_bit(report.ptr, i, &rec));
      const int decoded_ok =
          rec.alice_decoded == rec.bob_high && rec.bob_decoded == rec.alice_high;
      char buf[160];
      std::snprintf(buf, sizeof buf, "%zu,%c,%c,%d,%.12g,%.12g,%d\n", i,
                    rec.alice_high ? 'H' : 'L', rec.bob_high ? 'H' : 'L', rec.secure,
                    rec.mean_square_voltage, rec.mean_square_current, decoded_ok);
      csv += buf;
    }
    outputs.push_back({"kljn_bits.csv", std::move(csv)});
  }

  const std::int64_t trace_bit = params.at("trace_bit").get<std::int64_t>();
  if (trace_bit >= 0) {
    if (static_cast<std::size_t>(trace_bit) >= bits)
      fail_validation("--trace-bit " + std::to_string(trace_bit) +
                      " out of range (run has " + std::to_string(bits) + " bits)");
    kljn_bit_record rec;
    check(kljn_report_get_bit(report.ptr, static_cast<std::size_t>(trace_bit), &rec));
    Trace trace;
    check(kljn_simulate_bit(&p, rec.alice_high, rec.bob_high,
                            static_cast<std::uint64_t>(trace_bit), &trace.ptr));

    std::string blob;
    auto put = [&blob](const void* data, std::size_t size) {
      blob.append(static_cast<const char*>(data), size);
    };
    blob.append("KLJN", 4);
    const std::uint32_t version = 1;
    put(&version, sizeof version);
    double rate = 0.0;
    check(kljn_trace_sample_rate(trace.ptr, &rate));
    put(&rate, sizeof rate);
    const std::uint64_t count = kljn_trace_sample_count(trace.ptr);
    put(&count, sizeof count);
    for (int channel = 0; channel < 3; ++channel) {
      const double* data = nullptr;
      check(kljn_trace_channel(trace.ptr, channel, &data));
      put(data, count * sizeof(double));
    }
    outputs.push_back({"kljn_trace_bit" + std::to_string(trace_bit) + ".bin",
                       std::move(blob)});
  }
  return out;
}

json exec_delay_probe(const json& params, std::vector<OutputFile>& outputs) {
  const kljn_sim_params p = params_from_config(params.at("config"));
  const std::string direction = params.at("direction").get<std::string>();
  const kljn_direction dir =
      direction == "toward_bob" ? KLJN_TOWARD_BOB : KLJN_TOWARD_ALICE;
  const double probe_frequency = params.at("probe_frequency").get<double>();
  double tau = 0.0;
  check(kljn_delay_probe(&p, dir, probe_frequency, &tau));
  const json out = {{"direction", direction},
                    {"probe_frequency_hz", probe_frequency},
                    {"tau_s", tau},
                    {"cable_length_m", p.cable.length},
                    {"velocity_m_per_s", p.cable.length / tau}};
  outputs.push_back({"delay_probe.json", out.dump(2) + "\n"});
  return out;
}

json execute(const std::string& command, const json& params,
             std::vector<OutputFile>& outputs) {
  if (command == "cable-info") return exec_cable_info(params, outputs);
  if (command == "wave-check") return exec_wave_check(params, outputs);
  if (command == "ac-sweep") return exec_ac_sweep(params, outputs);
  if (command == "phase-velocity-table") return exec_phase_velocity_table(params, outputs);
  if (command == "thermal-budget") return exec_thermal_budget(params, outputs);
  if (command == "kljn-run") return exec_kljn_run(params, outputs);
  if (command == "delay-probe") return exec_delay_probe(params, outputs);
  fail_validation("unknown command '" + command + "'");
}

std::string file_stem(const std::string& command) {
  std::string stem = command;
  std::replace(stem.begin(), stem.end(), '-', '_');
  return stem;
}

/// Runs a command from fully resolved parameters, writes its outputs and
/// the manifest, and echoes the primary JSON (if any) to stdout.
void run_and_write(const std::string& command, const json& params,
                   const fs::path& output_dir) {
  std::vector<OutputFile> outputs;
  const json echo = execute(command, params, outputs);

  json manifest = {{"command", command},
                   {"parameters", params},
                   {"tool_version", kljn_version()}};
  if (params.contains("config") && params.at("config").contains("rng_seed"))
    manifest["rng_seed"] = params.at("config").at("rng_seed");
  json names = json::array();
  for (const OutputFile& output : outputs) names.push_back(output.name);
  manifest["outputs"] = names;

  for (const OutputFile& output : outputs)
    atomic_write(output_dir / output.name, output.bytes);
  atomic_write(output_dir / (file_stem(command) + ".manifest.json"),
               manifest.dump(2) + "\n");

  if (!echo.is_null()) std::cout << echo.dump(2) << "\n";
}

void run_rerun(const std::string& manifest_path, const std::optional<std::string>& out_dir) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) fail_validation("cannot open manifest '" + manifest_path + "'");
  json manifest;
  try {
    manifest = json::parse(is);
  } catch (const json::parse_error& e) {
    fail_validation(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("command") ||
      !manifest.contains("parameters"))
    fail_validation("manifest must carry 'command' and 'parameters'");
  const std::string recorded_version = manifest.value("tool_version", "");
  if (recorded_version != kljn_version())
    std::cerr << "warning: manifest was written by version '" << recorded_version
              << "', this tool is '" << kljn_version()
              << "'; bit-identical outputs are not guaranteed\n";
  fs::path target;
  if (out_dir) {
    target = *out_dir;
  } else {
    target = fs::path(manifest_path).parent_path();
    if (target.empty()) target = ".";
  }
  run_and_write(manifest.at("command").get<std::string>(), manifest.at("parameters"),
                target);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"KLJN cable-physics toolkit: lumped-model AC analysis, wave-equation "
               "reference, thermal energy budgets and a time-domain key-exchange "
               "simulator on a finite coaxial cable"};
  app.require_subcommand(1);

  // --- cable-info ---------------------------------------------------
  auto* info_cmd = app.add_subcommand(
      "cable-info", "Derived cable quantities (L_c, C_c, R_c, v_c, R_w, f_min) as JSON");
  CableArgs info_cable;
  add_cable_options(info_cmd, info_cable);
  std::string info_dir = ".";
  info_cmd->add_option("-o,--output-dir", info_dir, "Directory for outputs and manifest");
  info_cmd->callback([&] {
    run_and_write("cable-info", json{{"cable", resolve_cable(info_cable)}}, info_dir);
  });

  // --- wave-check ---------------------------------------------------
  auto* wave_cmd = app.add_subcommand(
      "wave-check", "Forbidden-band report: wave modes admitted below a cutoff");
  CableArgs wave_cable;
  add_cable_options(wave_cmd, wave_cable);
  EngValue wave_fc;
  add_eng(wave_cmd, "--fc", wave_fc, "Noise cutoff f_c [Hz]")->required();
  std::string wave_dir = ".";
  wave_cmd->add_option("-o,--output-dir", wave_dir, "Directory for outputs and manifest");
  wave_cmd->callback([&] {
    run_and_write("wave-check",
                  json{{"cable", resolve_cable(wave_cable)},
                       {"fc", eng_required(wave_fc, "--fc")}},
                  wave_dir);
  });

  // --- ac-sweep -----------------------------------------------------
  auto* sweep_cmd = app.add_subcommand(
      "ac-sweep", "Frequency sweep of |U_AB| and its phase vs the drive-end node");
  CableArgs sweep_cable;
  add_cable_options(sweep_cmd, sweep_cable);
  std::string sweep_model = "lossless";
  sweep_cmd->add_option("--model", sweep_model,
                        "Cable model: lossless|lossy|pi|ladder[:N] (default lossless)");
  EngValue sweep_ra, sweep_rb, sweep_amplitude, sweep_f_start, sweep_f_stop;
  add_eng(sweep_cmd, "--ra", sweep_ra, "Alice-side resistance [ohm] (default R_w)");
  add_eng(sweep_cmd, "--rb", sweep_rb, "Bob-side resistance [ohm] (default R_w)");
  add_eng(sweep_cmd, "--amplitude", sweep_amplitude, "Drive amplitude [V] (default 1)");
  std::string sweep_drive = "alice";
  sweep_cmd->add_option("--drive-end", sweep_drive, "Driven end: alice|bob")
      ->check(CLI::IsMember({"alice", "bob"}));
  add_eng(sweep_cmd, "--f-start", sweep_f_start, "Sweep start [Hz] (default 100)");
  add_eng(sweep_cmd, "--f-stop", sweep_f_stop, "Sweep stop [Hz] (default 10M)");
  int sweep_ppd = 20;
  sweep_cmd->add_option("--points-per-decade", sweep_ppd,
                        "Logarithmic density (default 20)");
  std::string sweep_format = "csv";
  sweep_cmd->add_option("--format", sweep_format, "Output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  std::string sweep_dir = ".";
  sweep_cmd->add_option("-o,--output-dir", sweep_dir, "Directory for outputs and manifest");
  sweep_cmd->callback([&] {
    json cable = resolve_cable(sweep_cable);
    Cable handle = make_cable(cable);
    kljn_cable_info derived;
    check(kljn_cable_derive(handle.ptr, &derived));

    std::string model = sweep_model;
    int segments = 0;
    if (const auto colon = model.find(':'); colon != std::string::npos) {
      const std::string count = model.substr(colon + 1);
      model = model.substr(0, colon);
      if (model != "ladder")
        fail_validation("only the ladder model takes a segment count (ladder:N)");
      try {
        segments = std::stoi(count);
      } catch (const std::exception&) {
        fail_validation("invalid ladder segment count '" + count + "'");
      }
    } else if (model == "ladder") {
      segments = 64;
    }

    json params = {{"cable", cable},
                   {"model", model},
                   {"ra", eng_or(sweep_ra, "--ra", derived.wave_impedance)},
                   {"rb", eng_or(sweep_rb, "--rb", derived.wave_impedance)},
                   {"amplitude", eng_or(sweep_amplitude, "--amplitude", 1.0)},
                   {"drive_end", sweep_drive},
                   {"f_start", eng_or(sweep_f_start, "--f-start", 100.0)},
                   {"f_stop", eng_or(sweep_f_stop, "--f-stop", 10e6)},
                   {"points_per_decade", sweep_ppd},
                   {"format", sweep_format}};
    if (model == "ladder") params["segments"] = segments;
    run_and_write("ac-sweep", params, sweep_dir);
  });

  // --- phase-velocity-table ----------------------------------------
  auto* table_cmd = app.add_subcommand(
      "phase-velocity-table",
      "Equivalent phase velocity over R in {10,20,50,1k,10k} ohm x f in {1k,5k} Hz");
  CableArgs table_cable;
  add_cable_options(table_cmd, table_cable);
  std::string table_format = "csv";
  table_cmd->add_option("--format", table_format, "Output format: csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
  std::string table_dir = ".";
  table_cmd->add_option("-o,--output-dir", table_dir, "Directory for outputs and manifest");
  table_cmd->callback([&] {
    run_and_write("phase-velocity-table",
                  json{{"cable", resolve_cable(table_cable)}, {"format", table_format}},
                  table_dir);
  });

  // --- thermal-budget ----------------------------------------------
  auto* thermal_cmd = app.add_subcommand(
      "thermal-budget", "Electric/magnetic energy versus the per-mode quota kT/2");
  CableArgs thermal_cable;
  add_cable_options(thermal_cmd, thermal_cable);
  EngValue thermal_t, thermal_fc, thermal_ra, thermal_rb;
  add_eng(thermal_cmd, "--T", thermal_t, "Physical temperature [K] (default 300)");
  add_eng(thermal_cmd, "--fc", thermal_fc, "Noise cutoff f_c [Hz]")->required();
  bool thermal_matched = false;
  thermal_cmd->add_flag("--matched", thermal_matched,
                        "Matched termination R_A = R_B = R_w");
  add_eng(thermal_cmd, "--ra", thermal_ra, "Alice-side resistance [ohm]");
  add_eng(thermal_cmd, "--rb", thermal_rb, "Bob-side resistance [ohm]");
  std::string thermal_method = "closed";
  thermal_cmd->add_option("--method", thermal_method,
                          "Spectral integral: closed|numeric (default closed)")
      ->check(CLI::IsMember({"closed", "numeric"}));
  std::string thermal_dir = ".";
  thermal_cmd->add_option("-o,--output-dir", thermal_dir,
                          "Directory for outputs and manifest");
  thermal_cmd->callback([&] {
    if (thermal_matched && (thermal_ra.present || thermal_rb.present))
      fail_validation("--matched excludes --ra/--rb");
    if (!thermal_matched && !(thermal_ra.present && thermal_rb.present))
      fail_validation("give --matched, or both --ra and --rb");
    json params = {{"cable", resolve_cable(thermal_cable)},
                   {"temperature", eng_or(thermal_t, "--T", 300.0)},
                   {"noise_cutoff", eng_required(thermal_fc, "--fc")},
                   {"matched", thermal_matched},
                   {"method", thermal_method}};
    if (!thermal_matched) {
      params["ra"] = eng_required(thermal_ra, "--ra");
      params["rb"] = eng_required(thermal_rb, "--rb");
    }
    run_and_write("thermal-budget", params, thermal_dir);
  });

  // --- kljn-run -----------------------------------------------------
  auto* run_cmd = app.add_subcommand(
      "kljn-run", "Simulate a KLJN key exchange and report decode/security statistics");
  std::string run_config;
  run_cmd->add_option("config", run_config, "JSON config file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  std::int64_t run_bits = 0;
  auto* run_bits_opt = run_cmd->add_option("--bits", run_bits, "Override bit_count");
  std::uint64_t run_seed = 0;
  auto* run_seed_opt = run_cmd->add_option("--seed", run_seed, "Override rng_seed");
  bool run_bits_csv = false;
  run_cmd->add_flag("--bits-csv", run_bits_csv, "Also write the per-bit CSV");
  std::int64_t run_trace_bit = -1;
  run_cmd->add_option("--trace-bit", run_trace_bit,
                      "Dump the raw traces of this bit index as binary");
  std::string run_dir = ".";
  run_cmd->add_option("-o,--output-dir", run_dir, "Directory for outputs and manifest");
  run_cmd->callback([&] {
    json config = resolve_config(run_config.empty()
                                     ? std::nullopt
                                     : std::optional<std::string>(run_config));
    if (run_bits_opt->count() > 0) config["bit_count"] = run_bits;
    if (run_seed_opt->count() > 0) config["rng_seed"] = run_seed;
    run_and_write("kljn-run",
                  json{{"config", config},
                       {"bits_csv", run_bits_csv},
                       {"trace_bit", run_trace_bit}},
                  run_dir);
  });

  // --- delay-probe --------------------------------------------------
  auto* probe_cmd = app.add_subcommand(
      "delay-probe",
      "Single-tone time-domain delay measurement on the mixed (R_H | R_L) loop");
  std::string probe_config;
  probe_cmd->add_option("config", probe_config, "JSON config file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  std::string probe_direction;
  probe_cmd->add_option("--direction", probe_direction, "Probe direction: bob|alice")
      ->required()
      ->check(CLI::IsMember({"bob", "alice"}));
  EngValue probe_freq, probe_ra, probe_rb;
  add_eng(probe_cmd, "--probe-freq", probe_freq,
          "Probe tone [Hz] (default min(f_c, sample_rate/100))");
  add_eng(probe_cmd, "--ra", probe_ra, "Alice-side resistance r_high [ohm]");
  add_eng(probe_cmd, "--rb", probe_rb, "Bob-side resistance r_low [ohm]");
  std::string probe_dir = ".";
  probe_cmd->add_option("-o,--output-dir", probe_dir,
                        "Directory for outputs and manifest");
  probe_cmd->callback([&] {
    json config = resolve_config(probe_config.empty()
                                     ? std::nullopt
                                     : std::optional<std::string>(probe_config));
    if (probe_ra.present) config["r_high"] = eng_required(probe_ra, "--ra");
    if (probe_rb.present) config["r_low"] = eng_required(probe_rb, "--rb");
    const double fallback = std::min(config.at("noise_cutoff").get<double>(),
                                     config.at("sample_rate").get<double>() / 100.0);
    run_and_write(
        "delay-probe",
        json{{"config", config},
             {"direction", probe_direction == "bob" ? "toward_bob" : "toward_alice"},
             {"probe_frequency", eng_or(probe_freq, "--probe-freq", fallback)}},
        probe_dir);
  });

  // --- rerun --------------------------------------------------------
  auto* rerun_cmd = app.add_subcommand(
      "rerun", "Re-execute a run manifest, reproducing its outputs byte-for-byte");
  std::string rerun_manifest;
  rerun_cmd->add_option("manifest", rerun_manifest, "Path to a *.manifest.json")
      ->required()
      ->check(CLI::ExistingFile);
  std::string rerun_dir;
  auto* rerun_dir_opt = rerun_cmd->add_option(
      "-o,--output-dir", rerun_dir, "Directory for outputs (default: manifest's)");
  rerun_cmd->callback([&] {
    run_rerun(rerun_manifest, rerun_dir_opt->count() > 0
                                  ? std::optional<std::string>(rerun_dir)
                                  : std::nullopt);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
