#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "lpisim/error.hpp"
#include "lpisim/scenario.hpp"

using namespace lpisim;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(LPISIM_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lpisim_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(LPISIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool mentions(const ValidationReport& r, const std::string& needle) {
  for (const auto& v : r.violations) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

const char* kRedshift = R"(
mode: redshift-pass
orbit:
  analytic: {semi_major_axis_m: 6.771e6}
station: {lat_deg: 0, lon_deg: 0, alt_m: 0}
optical: {wavelength_m: 800e-9, delay_length_m: 6000}
pass: {start_s: -100, end_s: 100, epochs: 11}
)";

}  // namespace

TEST_CASE("shipped configs validate") {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".yaml") continue;
    const auto report = validate_config(entry.path());
    INFO(entry.path().string());
    CHECK(report.ok());
    for (const auto& v : report.violations) MESSAGE(v);
    ++count;
  }
  CHECK(count >= 6);
}

TEST_CASE("validation reports every violation with its field") {
  const auto r = validate_config_text(R"(
mode: alpha-forecast
orbit:
  analytic: {semi_major_axis_m: 1000}
  ephemeris: {file: nowhere.cpf, epoch_mjd: 1, epoch_sod: 0}
station: {lat_deg: 120, lon_deg: 0}
optical: {wavelength_m: -1, delay_length_m: 6000}
noise: {photon_budget: 1e6, efficiency: 1.5, visibility: 0.9, trials: 3}
pass: {start_s: 10, end_s: -10}
)", ".");
  CHECK(!r.ok());
  CHECK(mentions(r, "seed"));
  CHECK(mentions(r, "mutually exclusive"));
  CHECK(mentions(r, "station.lat_deg"));
  CHECK(mentions(r, "station.alt_m"));
  CHECK(mentions(r, "optical.wavelength_m"));
  CHECK(mentions(r, "noise.efficiency"));
  CHECK(mentions(r, "noise.trials"));
  CHECK(mentions(r, "pass"));
  CHECK(r.violations.size() >= 8);
}

TEST_CASE("validation of individual fields") {
  CHECK(mentions(validate_config_text("mode: teleport\n", "."), "mode"));
  CHECK(mentions(validate_config_text("mode: [unclosed\n", "."), "syntax"));
  CHECK(mentions(validate_config_text("- a\n- b\n", "."), "map"));
  CHECK(mentions(validate_config_text("mode: fringe-demo\nseed: 1\nnoise: {visibility: x, efficiency: 1}\n"
                                      "fringe: {phase_deg: 0, n_per_point: 100}\n",
                                      "."),
                 "noise.visibility"));
  CHECK(mentions(validate_config_text("mode: weakvalue-scan\nspin: {g_mps2: 9.81, exchange_J: 0, t_s: 1,"
                                      " pre_system: up, theta_deg: {start: 0, stop: 1, count: 2},"
                                      " q_over_width: [0.001]}\n",
                                      "."),
                 "spin.pre_system"));
  CHECK(validate_config_text("mode: constants\n", ".").ok());
  CHECK(validate_config_text(kRedshift, ".").ok());
}

TEST_CASE("loading an invalid config throws ConfigInvalid") {
  try {
    load_config_text("mode: alpha-forecast\n", ".");
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
  }
  const auto cfg = load_config_text(kRedshift, ".");
  CHECK(cfg.mode == Mode::RedshiftPass);
  CHECK(cfg.pass.epochs == 11);
  CHECK(cfg.optical.tau_l == doctest::Approx(6000 / 299792458.0));
}

TEST_CASE("constants mode writes a header and three rows") {
  ScenarioConfig cfg;
  cfg.mode = Mode::Constants;
  cfg.output_dir = scratch("constants");
  const auto out = run_scenario(cfg);
  CHECK(out.exit_code == 0);
  const std::string table = slurp(out.results_file);
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
  CHECK(table == format_constants_table());
  CHECK(slurp(out.summary_file).find("hbar_g_over_c") != std::string::npos);
}

TEST_CASE("redshift pass reports the published comparisons") {
  auto cfg = load_config_text(kRedshift, ".");
  cfg.output_dir = scratch("redshift");
  const auto out = run_scenario(cfg);
  CHECK(out.exit_code == 0);
  const std::string summary = slurp(out.summary_file);
  CHECK(summary.find("few radians") != std::string::npos);
  CHECK(summary.find("~1e5") != std::string::npos);
  const std::string results = slurp(out.results_file);
  CHECK(std::count(results.begin(), results.end(), '\n') == 12);
}

TEST_CASE("stochastic modes are reproducible from the seed") {
  const fs::path dir = scratch("fringe");
  for (const char* sub : {"a", "b"}) {
    auto cfg = load_config(kConfigs / "fringe_demo.yaml");
    cfg.output_dir = dir / sub;
    CHECK(run_scenario(cfg).exit_code == 0);
  }
  CHECK(slurp(dir / "a" / "results.tsv") == slurp(dir / "b" / "results.tsv"));
  CHECK(slurp(dir / "a" / "summary.txt") == slurp(dir / "b" / "summary.txt"));
}

TEST_CASE("runtime failures are recorded and give exit code 3") {
  const fs::path dir = scratch("runtime");
  std::string text = slurp(kConfigs / "ephemeris_pass.yaml");
  text.replace(text.find("epoch_sod: 43200"), 16, "epoch_sod: 80000");
  text.replace(text.find("data/circular_400km.cpf"), 23, (kConfigs / "data/circular_400km.cpf").string());
  write(dir / "outside.yaml", text);
  const auto out = run_scenario(dir / "outside.yaml", dir / "out");
  CHECK(out.exit_code == 3);
  REQUIRE(!out.steps.empty());
  CHECK(!out.steps.front().ok);
  CHECK(out.steps.front().message.find("OutOfRange") != std::string::npos);
  CHECK(slurp(out.summary_file).find("[FAILED]") != std::string::npos);
}

TEST_CASE("command-line exit codes and output override") {
  const fs::path dir = scratch("cli");
  write(dir / "bad.yaml", "mode: alpha-forecast\n");
  write(dir / "good.yaml", "mode: constants\noutput_dir: from_config\n");
  CHECK(cli("constants") == 0);
  CHECK(cli("validate " + (dir / "good.yaml").string()) == 0);
  CHECK(cli("validate " + (dir / "bad.yaml").string()) == 2);
  CHECK(cli("run " + (dir / "bad.yaml").string()) == 2);
  CHECK(cli("run " + (dir / "missing.yaml").string()) == 2);
  CHECK(cli("frobnicate") == 2);

  CHECK(cli("run " + (dir / "good.yaml").string()) == 0);
  CHECK(fs::exists(dir / "from_config" / "results.tsv"));
  CHECK(cli("run " + (dir / "good.yaml").string(), "LPISIM_OUTPUT_DIR=" + (dir / "env").string()) == 0);
  CHECK(fs::exists(dir / "env" / "results.tsv"));
  CHECK(cli("run " + (dir / "good.yaml").string() + " -o " + (dir / "flag").string()) == 0);
  CHECK(fs::exists(dir / "flag" / "summary.txt"));

  std::string text = slurp(kConfigs / "ephemeris_pass.yaml");
  text.replace(text.find("epoch_sod: 43200"), 16, "epoch_sod: 80000");
  text.replace(text.find("data/circular_400km.cpf"), 23, (kConfigs / "data/circular_400km.cpf").string());
  write(dir / "outside.yaml", text);
  CHECK(cli("run " + (dir / "outside.yaml").string() + " -o " + (dir / "o").string()) == 3);
}
