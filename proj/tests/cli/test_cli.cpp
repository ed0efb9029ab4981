#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Spawns the CLI with `args` (already shell-quoted where needed),
/// capturing exit code, stdout and stderr.
RunResult run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out_path = scratch / "stdout.txt";
  const fs::path err_path = scratch / "stderr.txt";
  const std::string cmd = std::string("'") + KLJN_CLI_PATH + "' " + args + " > '" +
                          out_path.string() + "' 2> '" + err_path.string() + "'";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out_path);
  r.err = read_file(err_path);
  return r;
}

/// Per-test temporary directory, removed on destruction.
struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "kljn_cli_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    REQUIRE(mkdtemp(buf.data()) != nullptr);
    path = buf.data();
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() { fs::remove_all(path); }
};

// ------------------------------------------------------------------
// Minimal JSON-schema checker covering exactly the keywords the
// shipped schemas use: type, required, properties, additionalProperties
// (false), items, enum, minimum, maximum.
// ------------------------------------------------------------------

bool type_matches(const std::string& type, const json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "number") return value.is_number();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "boolean") return value.is_boolean();
  return false;
}

std::string schema_mismatch(const json& schema, const json& value, const std::string& where) {
  if (schema.contains("type") && !type_matches(schema["type"], value))
    return where + ": expected type " + schema["type"].get<std::string>();
  if (schema.contains("enum")) {
    bool hit = false;
    for (const json& option : schema["enum"]) hit = hit || option == value;
    if (!hit) return where + ": value not in enum";
  }
  if (schema.contains("minimum") && value.is_number() &&
      value.get<double>() < schema["minimum"].get<double>())
    return where + ": below minimum";
  if (schema.contains("maximum") && value.is_number() &&
      value.get<double>() > schema["maximum"].get<double>())
    return where + ": above maximum";
  if (value.is_object()) {
    if (schema.contains("required"))
      for (const json& key : schema["required"])
        if (!value.contains(key.get<std::string>()))
          return where + ": missing required key '" + key.get<std::string>() + "'";
    const json properties = schema.value("properties", json::object());
    if (schema.value("additionalProperties", json(true)) == json(false))
      for (const auto& item : value.items())
        if (!properties.contains(item.key()))
          return where + ": unexpected key '" + item.key() + "'";
    for (const auto& item : value.items())
      if (properties.contains(item.key())) {
        const std::string why =
            schema_mismatch(properties[item.key()], item.value(), where + "." + item.key());
        if (!why.empty()) return why;
      }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      const std::string why = schema_mismatch(schema["items"], value[i],
                                              where + "[" + std::to_string(i) + "]");
      if (!why.empty()) return why;
    }
  }
  return "";
}

void check_schema(const char* schema_file, const json& value) {
  const json schema = json::parse(read_file(fs::path(KLJN_SCHEMA_DIR) / schema_file));
  const std::string why = schema_mismatch(schema, value, "$");
  CHECK_MESSAGE(why.empty(), schema_file << " mismatch: " << why);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

bool no_tmp_litter(const fs::path& dir) {
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".tmp") return false;
  return true;
}

double rel(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

std::string quoted(const fs::path& path) { return "'" + path.string() + "'"; }

} // namespace

TEST_CASE("cable-info writes a schema-clean report and echoes it to stdout") {
  TempDir dir;
  const RunResult r = run_cli("cable-info --preset rg58-1m5 -o " + quoted(dir.path), dir.path);
  CHECK(r.code == 0);

  const fs::path report_path = dir.path / "cable_info.json";
  REQUIRE(fs::exists(report_path));
  const std::string bytes = read_file(report_path);
  CHECK(r.out == bytes);

  const json report = json::parse(bytes);
  check_schema("cable_info.schema.json", report);
  CHECK(rel(report["derived"]["min_wave_frequency_hz"].get<double>(), 2.0e8 / 3.0) < 1e-9);
  CHECK(rel(report["derived"]["wave_impedance_ohm"].get<double>(), 50.0) < 1e-9);

  const fs::path manifest_path = dir.path / "cable_info.manifest.json";
  REQUIRE(fs::exists(manifest_path));
  check_schema("manifest.schema.json", json::parse(read_file(manifest_path)));
  CHECK(no_tmp_litter(dir.path));
}

TEST_CASE("cable geometry overrides and underspecification") {
  TempDir dir;
  // Doubling the length halves f_min.
  const RunResult ok = run_cli(
      "cable-info --preset rg58-1m5 --length 3.0 -o " + quoted(dir.path), dir.path);
  CHECK(ok.code == 0);
  const json report = json::parse(read_file(dir.path / "cable_info.json"));
  CHECK(rel(report["derived"]["min_wave_frequency_hz"].get<double>(), 1.0e8 / 3.0) < 1e-9);

  const RunResult missing = run_cli("cable-info -o " + quoted(dir.path), dir.path);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("underspecified") != std::string::npos);
}

TEST_CASE("help succeeds and unknown subcommands fail") {
  TempDir dir;
  CHECK(run_cli("--help", dir.path).code == 0);
  CHECK(run_cli("frobnicate", dir.path).code == 2);
}

TEST_CASE("wave-check counts admitted modes below the cutoff") {
  TempDir dir;
  const RunResult compliant =
      run_cli("wave-check --preset rg58-1m5 --fc 5k -o " + quoted(dir.path), dir.path);
  CHECK(compliant.code == 0);
  json report = json::parse(read_file(dir.path / "wave_check.json"));
  check_schema("wave_check.schema.json", report);
  CHECK(report["mode_count_below_cutoff"].get<int>() == 0);
  CHECK(report["cutoff_hz"].get<double>() == 5.0e3);

  const RunResult wideband =
      run_cli("wave-check --preset rg58-1m5 --fc 150M -o " + quoted(dir.path), dir.path);
  CHECK(wideband.code == 0);
  report = json::parse(read_file(dir.path / "wave_check.json"));
  CHECK(report["mode_count_below_cutoff"].get<int>() == 2);

  CHECK(run_cli("wave-check --preset rg58-1m5 --fc 0 -o " + quoted(dir.path), dir.path)
            .code == 2);
}

TEST_CASE("ac-sweep emits the documented CSV layout") {
  TempDir dir;
  const RunResult r =
      run_cli("ac-sweep --preset rg58-1m5 --ra 1k --rb 10k -o " + quoted(dir.path), dir.path);
  CHECK(r.code == 0);
  CHECK(r.out.empty()); // tables are not echoed

  const std::vector<std::string> lines = lines_of(read_file(dir.path / "ac_sweep.csv"));
  REQUIRE(lines.size() == 102); // header + 5 decades * 20 points + endpoint
  CHECK(lines[0] == "freq_hz,mag_uab_v,phase_deg,phase_unwrapped_deg");
  const std::vector<std::string> first = fields_of(lines[1]);
  REQUIRE(first.size() == 4);
  CHECK(rel(std::stod(first[0]), 100.0) < 1e-9);
  // At 100 Hz the inductive drop leads the node voltage by ~90 degrees.
  CHECK(std::abs(std::stod(first[2]) - 90.0) < 0.1);
  CHECK(no_tmp_litter(dir.path));
}

TEST_CASE("ac-sweep JSON format, ladder models and input checking") {
  TempDir dir;
  const RunResult r = run_cli(
      "ac-sweep --preset rg58-1m5 --model ladder:16 --format json -o " + quoted(dir.path),
      dir.path);
  CHECK(r.code == 0);
  const json rows = json::parse(read_file(dir.path / "ac_sweep.json"));
  check_schema("ac_sweep.schema.json", rows);
  REQUIRE(rows.is_array());
  CHECK(rows.size() == 101);

  const json manifest = json::parse(read_file(dir.path / "ac_sweep.manifest.json"));
  CHECK(manifest["parameters"]["segments"].get<int>() == 16);

  CHECK(run_cli("ac-sweep --preset rg58-1m5 --model bogus -o " + quoted(dir.path), dir.path)
            .code == 2);

  // Sweeping into the wave band is allowed but flagged.
  const RunResult wide = run_cli(
      "ac-sweep --preset rg58-1m5 --f-stop 100M -o " + quoted(dir.path), dir.path);
  CHECK(wide.code == 0);
  CHECK(wide.err.find("warning: sweep extends above f_min") != std::string::npos);
}

TEST_CASE("phase-velocity-table reproduces the superluminal grid") {
  TempDir dir;
  const RunResult r =
      run_cli("phase-velocity-table --preset rg58-1m5 -o " + quoted(dir.path), dir.path);
  CHECK(r.code == 0);

  const std::vector<std::string> lines =
      lines_of(read_file(dir.path / "phase_velocity.csv"));
  REQUIRE(lines.size() == 11); // header + 5 resistances * 2 frequencies
  CHECK(lines[0] == "r_ohm,f_hz,v_m_per_s");

  bool saw_matched = false, saw_1k = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string> row = fields_of(lines[i]);
    REQUIRE(row.size() == 3);
    const double r_ohm = std::stod(row[0]);
    const double f_hz = std::stod(row[1]);
    const double v = std::stod(row[2]);
    if (r_ohm == 50.0 && f_hz == 1000.0) {
      saw_matched = true;
      CHECK(rel(v, 2.0e8) < 5e-3); // matched load moves at the true wave velocity
    }
    if (r_ohm == 1000.0 && f_hz == 1000.0) {
      saw_1k = true;
      CHECK(rel(v, 4.0e9) < 5e-3); // 13x the speed of light
    }
  }
  CHECK(saw_matched);
  CHECK(saw_1k);

  const RunResult as_json = run_cli(
      "phase-velocity-table --preset rg58-1m5 --format json -o " + quoted(dir.path), dir.path);
  CHECK(as_json.code == 0);
  check_schema("phase_velocity.schema.json",
               json::parse(read_file(dir.path / "phase_velocity.json")));
}

TEST_CASE("thermal-budget handles matched and explicit terminations") {
  TempDir dir;
  const RunResult matched = run_cli(
      "thermal-budget --preset rg58-1m5 --matched --T 300 --fc 5k -o " + quoted(dir.path),
      dir.path);
  CHECK(matched.code == 0);
  const json closed = json::parse(read_file(dir.path / "thermal_budget.json"));
  check_schema("thermal_budget.schema.json", closed);
  CHECK(closed["method"] == "closed");
  CHECK(rel(closed["f0c_hz"].get<double>(), closed["f0l_hz"].get<double>()) < 1e-12);
  CHECK(rel(closed["e_e_j"].get<double>(), closed["e_m_j"].get<double>()) < 1e-12);

  const RunResult numeric = run_cli(
      "thermal-budget --preset rg58-1m5 --matched --T 300 --fc 5k --method numeric -o " +
          quoted(dir.path),
      dir.path);
  CHECK(numeric.code == 0);
  const json quad = json::parse(read_file(dir.path / "thermal_budget.json"));
  CHECK(quad["method"] == "numeric");
  CHECK(rel(quad["e_e_j"].get<double>(), closed["e_e_j"].get<double>()) < 1e-9);

  // --matched and explicit resistances are mutually exclusive; one of
  // them is mandatory.
  CHECK(run_cli("thermal-budget --preset rg58-1m5 --matched --ra 50 --rb 50 --T 300 --fc 5k -o " +
                    quoted(dir.path),
                dir.path)
            .code == 2);
  CHECK(run_cli("thermal-budget --preset rg58-1m5 --T 300 --fc 5k -o " + quoted(dir.path),
                dir.path)
            .code == 2);

  // A cutoff the adaptive quadrature cannot resolve is a numeric error.
  CHECK(run_cli(
            "thermal-budget --preset rg58-1m5 --matched --T 300 --fc 1e30 --method numeric -o " +
                quoted(dir.path),
            dir.path)
            .code == 3);
}

TEST_CASE("kljn-run produces report, bits, trace and a replayable manifest") {
  TempDir dir;
  const fs::path config_path = dir.path / "config.json";
  {
    std::ofstream config(config_path);
    config << R"({"r_low": "2k", "bit_count": 6, "bit_period": 0.1, "rng_seed": 7})";
  }
  const fs::path out_a = dir.path / "a";
  const RunResult r = run_cli("kljn-run " + quoted(config_path) + " --bits-csv --trace-bit 3 -o " +
                                  quoted(out_a),
                              dir.path);
  CHECK(r.code == 0);

  const json report = json::parse(read_file(out_a / "kljn_report.json"));
  check_schema("kljn_report.schema.json", report);
  CHECK(report["config"]["r_low"].get<double>() == 2000.0); // suffix string expanded
  CHECK(report["bit_count"].get<int>() == 6);
  CHECK(report["legit_error_rate"].get<double>() == 0.0);

  const std::vector<std::string> bits = lines_of(read_file(out_a / "kljn_bits.csv"));
  REQUIRE(bits.size() == 7);
  CHECK(bits[0] == "bit,alice,bob,secure,msv_v2,msc_a2,decoded_ok");
  for (std::size_t i = 1; i < bits.size(); ++i) {
    const std::vector<std::string> row = fields_of(bits[i]);
    REQUIRE(row.size() == 7);
    CHECK((row[1] == "H" || row[1] == "L"));
    CHECK(row[6] == "1");
  }

  // Trace container: magic, format version, rate, count, 3 channels.
  const std::string trace = read_file(out_a / "kljn_trace_bit3.bin");
  REQUIRE(trace.size() == 4 + 4 + 8 + 8 + 3 * 10000 * 8);
  CHECK(trace.compare(0, 4, "KLJN") == 0);
  std::uint32_t version = 0;
  std::memcpy(&version, trace.data() + 4, 4);
  CHECK(version == 1);
  double rate = 0.0;
  std::memcpy(&rate, trace.data() + 8, 8);
  CHECK(rate == 1.0e5);
  std::uint64_t count = 0;
  std::memcpy(&count, trace.data() + 16, 8);
  CHECK(count == 10000);

  const fs::path manifest_path = out_a / "kljn_run.manifest.json";
  const json manifest = json::parse(read_file(manifest_path));
  check_schema("manifest.schema.json", manifest);
  CHECK(manifest.contains("rng_seed"));

  // Replaying the manifest reproduces every output byte for byte.
  const fs::path out_b = dir.path / "b";
  const RunResult replay =
      run_cli("rerun " + quoted(manifest_path) + " -o " + quoted(out_b), dir.path);
  CHECK(replay.code == 0);
  for (const char* name : {"kljn_report.json", "kljn_bits.csv", "kljn_trace_bit3.bin"})
    CHECK_MESSAGE(read_file(out_a / name) == read_file(out_b / name), name << " drifted");

  // A different seed must change the outputs.
  const fs::path out_c = dir.path / "c";
  const RunResult reseeded = run_cli(
      "kljn-run " + quoted(config_path) + " --seed 8 -o " + quoted(out_c), dir.path);
  CHECK(reseeded.code == 0);
  CHECK(read_file(out_c / "kljn_report.json") != read_file(out_a / "kljn_report.json"));
  CHECK(no_tmp_litter(out_a));
}

TEST_CASE("kljn-run rejects bad configs and out-of-range trace requests") {
  TempDir dir;
  const fs::path bad_config = dir.path / "bad.json";
  {
    std::ofstream config(bad_config);
    config << R"({"r_lo": 2000})";
  }
  const RunResult bad = run_cli("kljn-run " + quoted(bad_config) + " -o " + quoted(dir.path),
                                dir.path);
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unknown key") != std::string::npos);

  const fs::path config_path = dir.path / "config.json";
  {
    std::ofstream config(config_path);
    config << R"({"bit_count": 4, "bit_period": 0.1})";
  }
  CHECK(run_cli("kljn-run " + quoted(config_path) + " --trace-bit 10 -o " + quoted(dir.path),
                dir.path)
            .code == 2);
}

TEST_CASE("delay-probe reports the direction-dependent delay") {
  TempDir dir;
  // Bob terminates with 10 ohm: tau = L_c/10 = 37.5 ns, an apparent
  // velocity of 4e7 m/s on the 1.5 m cable.
  const RunResult toward_bob = run_cli(
      "delay-probe --direction bob --rb 10 -o " + quoted(dir.path), dir.path);
  CHECK(toward_bob.code == 0);
  json probe = json::parse(read_file(dir.path / "delay_probe.json"));
  check_schema("delay_probe.schema.json", probe);
  CHECK(probe["direction"] == "toward_bob");
  CHECK(rel(probe["tau_s"].get<double>(), 3.75e-8) < 0.05);
  CHECK(rel(probe["velocity_m_per_s"].get<double>(), 4.0e7) < 0.05);

  // Toward Alice the far-end resistor is r_high.
  const RunResult toward_alice = run_cli(
      "delay-probe --direction alice --ra 2k -o " + quoted(dir.path), dir.path);
  CHECK(toward_alice.code == 0);
  probe = json::parse(read_file(dir.path / "delay_probe.json"));
  CHECK(probe["direction"] == "toward_alice");
  CHECK(rel(probe["tau_s"].get<double>() * 2000.0, 0.375e-6) < 0.05);

  // Probe tones above the quasi-static band are refused.
  CHECK(run_cli("delay-probe --direction bob --probe-freq 1M -o " + quoted(dir.path),
                dir.path)
            .code == 2);
}

TEST_CASE("rerun warns when the recording tool version differs") {
  TempDir dir;
  const RunResult first =
      run_cli("cable-info --preset rg58-1m5 -o " + quoted(dir.path), dir.path);
  REQUIRE(first.code == 0);

  const fs::path manifest_path = dir.path / "cable_info.manifest.json";
  json manifest = json::parse(read_file(manifest_path));
  manifest["tool_version"] = "9.9.9";
  {
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << "\n";
  }
  const fs::path out_b = dir.path / "replay";
  const RunResult replay =
      run_cli("rerun " + quoted(manifest_path) + " -o " + quoted(out_b), dir.path);
  CHECK(replay.code == 0);
  CHECK(replay.err.find("warning: manifest was written by version") != std::string::npos);
  CHECK(fs::exists(out_b / "cable_info.json"));
}
