#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include "maryland/cli/commands.hpp"
#include "maryland/cli/config.hpp"

using namespace maryland;
using namespace maryland::cli;
namespace fs = std::filesystem;

namespace {

const std::string kBase = R"({
  "model": {"d": 1, "epsilon": 0.02, "theta": 0.3, "box_radius": 8},
  "solver": {"p": 1, "delta": 0.001, "anchors": [{"beta": [0], "a": 1.3}]},
  "separation": {"N": 3, "R": 2, "monte_carlo_samples": 0},
  "probes": {"scales": [2, 3], "sigma_samples": 20},
  "seed": 3
})";

std::string code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.code;
  }
  return "";
}

std::string with(const std::string& from, const std::string& to) {
  std::string s = kBase;
  const auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("maryland_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("base config parses with defaults") {
  const ExperimentConfig c = parse_config(kBase);
  CHECK(c.model.alpha(0) == golden_frequency());
  CHECK(c.solver.M == 3);
  CHECK(c.threads == 1);
  CHECK(parse_config(dump(config_json(c))).seed == 3);
}

TEST_CASE("config error codes") {
  CHECK(code_of("{") == "E_PARSE");
  CHECK(code_of(with("\"seed\": 3", "\"seed\": 3, \"colour\": 1")) == "E_UNKNOWN_KEY");
  CHECK(code_of(with("\"epsilon\": 0.02", "\"epsilon\": \"small\"")) == "E_TYPE");
  CHECK(code_of(with("\"d\": 1, ", "")) == "E_MISSING_FIELD");
  CHECK(code_of(with("\"beta\": [0]", "\"beta\": [0, 0]")) == "E_DIMENSION");
  CHECK(code_of(with("\"epsilon\": 0.02", "\"epsilon\": -1")) == "E_RANGE");
  CHECK(code_of(with("[{\"beta\": [0], \"a\": 1.3}]", "[]")) == "E_NO_ANCHORS");
  CHECK(code_of(with("\"beta\": [0], ", "")) == "E_MISSING_SITE");
  CHECK(code_of(with(", \"a\": 1.3", "")) == "E_MISSING_AMPLITUDE");
  CHECK(code_of(with("{\"beta\": [0], \"a\": 1.3}", "{\"beta\": [0], \"a\": 1.3}, {\"beta\": [0], \"a\": 1.5}")) ==
        "E_ANCHOR_DUPLICATE");
  CHECK(code_of(with("\"a\": 1.3", "\"a\": 2.5")) == "E_AMPLITUDE_RANGE");
  CHECK(code_of(with("\"a\": 1.3", "\"a\": [1.3, 0.2]")) == "E_TYPE");
  CHECK(code_of(with("\"beta\": [0]", "\"beta\": [20]")) == "E_CAP");
}

TEST_CASE("missing config file") {
  try {
    load_config("/nonexistent/config.json");
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.code == "E_READ");
  }
}

TEST_CASE("config errors exit before any compute") {
  TempDir dir("bad");
  const std::string cfg = (dir.path / "bad.json").string();
  write_text(cfg, with(", \"a\": 1.3", ""));
  Overrides o;
  o.out = (dir.path / "out").string();
  std::ostringstream log;
  CHECK(run_command("solve", cfg, o, log) == kConfigError);
  CHECK(fs::exists(dir.path / "out" / "failure_solve.json"));
  CHECK_FALSE(fs::exists(dir.path / "out" / "solution.json"));
}

TEST_CASE("zero hopping spectrum") {
  TempDir dir("flat");
  const ExperimentConfig c = parse_config(with("\"epsilon\": 0.02", "\"epsilon\": 0.0"));
  const CommandResult r = cmd_spectrum(c, dir.str());
  CHECK(r.exit_code == kSuccess);
  CHECK(r.violations.empty());
  std::istringstream csv(read_text((dir.path / "profile.csv").string()));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "theta,energy");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto comma = line.find(',');
    const double th = std::stod(line.substr(0, comma)), e = std::stod(line.substr(comma + 1));
    CHECK(e == doctest::Approx(std::cos(std::numbers::pi * th) / std::sin(std::numbers::pi * th)).epsilon(1e-12));
    ++rows;
  }
  CHECK(rows == c.spectrum.theta_points);
}

TEST_CASE("rational frequency is a warning") {
  TempDir dir("third");
  const ExperimentConfig c = parse_config(with("\"theta\": 0.3", "\"theta\": 0.3, \"alpha\": [0.3333333333333333]"));
  const CommandResult r = cmd_spectrum(c, dir.str());
  CHECK(r.exit_code == kSuccess);
  CHECK_FALSE(r.warnings.empty());
  const Json rep = Json::parse(read_text((dir.path / "spectrum_report.json").string()));
  CHECK(rep["predicates"]["diophantine"] == "failed");
}

TEST_CASE("linear solve and closed form probe") {
  TempDir dir("linear");
  const ExperimentConfig c = parse_config(with("\"delta\": 0.001", "\"delta\": 0.0"));
  CHECK(cmd_solve(c, dir.str()).exit_code == kSuccess);
  const Json sol = Json::parse(read_text((dir.path / "solution.json").string()));
  CHECK(sol["solution"]["iterations"] == 0);
  CHECK(cmd_ldt(c, dir.str()).exit_code == kSuccess);
  const Json ldt = Json::parse(read_text((dir.path / "ldt.json").string()));
  CHECK(ldt["probe"]["scales"][0]["closed_form"] == true);
  CHECK(ldt["probe"]["monotonicity"].size() == 1);
}

TEST_CASE("report") {
  TempDir empty("empty");
  CHECK_THROWS_AS(cmd_report(empty.str()), MissingArtifacts);

  TempDir dir("report");
  const ExperimentConfig c = parse_config(kBase);
  cmd_spectrum(c, dir.str());
  cmd_separation(c, dir.str());
  cmd_solve(c, dir.str());
  cmd_ldt(c, dir.str());
  CHECK(cmd_report(dir.str()).exit_code == kSuccess);
  const std::string md = read_text((dir.path / "summary.md").string());
  for (const char* s : {"## spectrum", "## separation", "## solution", "## ldt"}) CHECK(md.find(s) != std::string::npos);

  write_text((dir.path / "solution.json").string(), "{\"schema_version\": 1, ");
  try {
    cmd_report(dir.str());
    FAIL("expected CorruptArtifact");
  } catch (const CorruptArtifact& e) {
    CHECK(e.file.find("solution.json") != std::string::npos);
  }
}

TEST_CASE("binary exit codes") {
  TempDir dir("bin");
  const std::string bin = MARYLAND_RUN_PATH;
  const std::string cfg = (dir.path / "c.json").string();
  write_text(cfg, "{ not json");
  const int status = std::system((bin + " solve --config " + cfg + " --out " + dir.str() + " > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == kConfigError);
  CHECK(WEXITSTATUS(std::system((bin + " report " + dir.str() + "/nothing > /dev/null 2>&1").c_str())) != 0);
}
