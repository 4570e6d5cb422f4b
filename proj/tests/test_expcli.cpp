#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace gibbs::cli;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gibbs-expcli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Runs the real executable; returns its exit code.
int gibbslab(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(GIBBSLAB_EXE) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path path = dir / "config.json";
  std::ofstream(path) << text;
  return path;
}

int run_with(const fs::path& dir, const std::string& command, const std::string& config, const std::string& extra = "") {
  const fs::path cfg = write_config(dir, config);
  return gibbslab(command + " --config " + cfg.string() + " --out " + (dir / "out").string() + " " + extra, dir);
}

}  // namespace

TEST_CASE("format_number is shortest round-trip") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(4.0 / 11.0) == "0.36363636363636365");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1e-300) == "1e-300");
  CHECK(std::stod(format_number(2.0 / 3.0)) == 2.0 / 3.0);
  CHECK_THROWS_AS(format_number(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("Config rejects unknown and nested keys") {
  const Config cfg = Config::from_json({{"seed", 1}, {"problem.n", 4}});
  CHECK_NOTHROW(cfg.reject_unknown({"seed", "problem.n"}));
  CHECK_THROWS_AS(cfg.reject_unknown({"seed"}), ConfigError);
  CHECK_THROWS_AS(Config::from_json({{"problem", {{"n", 4}}}}), ConfigError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::array()), ConfigError);
  CHECK(cfg.count("problem.n", 0) == 4);
  CHECK_THROWS_AS(Config::from_json({{"problem.n", -1}}).count("problem.n", 0), ConfigError);
  CHECK_THROWS_AS(Config::from_json({{"problem.n", 2.5}}).count("problem.n", 0), ConfigError);
}

TEST_CASE("every command writes its CSV, run.json and timing") {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"verify-thm1-discrete", R"({"random.instances": 20})"},
      {"verify-thm1-gaussian", R"({"mc.outer": 5000})"},
      {"sweep", R"({"sweep.values": [4, 8, 16]})"},
      {"mixture-concavity", R"({"mixture.pairs": 5})"},
      {"sgld-converge", R"({"chain.steps": 5000, "chain.learner_steps": 200, "mc.outer": 200})"},
      {"bounds-compare", "{}"},
  };
  for (const auto& [command, config] : runs) {
    CAPTURE(command);
    const fs::path dir = scratch("all-" + command);
    REQUIRE(run_with(dir, command, config, "--seed 5") == kExitPass);
    const fs::path csv = dir / "out" / (command + ".csv");
    REQUIRE(fs::exists(csv));
    const auto rows = lines(csv);
    REQUIRE(rows.size() >= 2);
    const std::size_t width = split(rows[0]).size();
    for (const auto& row : rows) CHECK(split(row).size() == width);
    CHECK(slurp(csv).find('\r') == std::string::npos);
    CHECK(fs::exists(dir / "out" / "timing.csv"));
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "run.json"));
    CHECK(manifest["schema"] == kSchemaVersion);
    CHECK(manifest["command"] == command);
    CHECK(manifest["seed"] == 5);
  }
}

TEST_CASE("re-runs are byte-identical, also across worker counts") {
  const std::string config = R"({"random.instances": 30, "seed": 17})";
  const fs::path a = scratch("repro-a");
  const fs::path b = scratch("repro-b");
  REQUIRE(run_with(a, "verify-thm1-discrete", config) == kExitPass);
  REQUIRE(run_with(b, "verify-thm1-discrete", config, "--workers 1") == kExitPass);
  CHECK(slurp(a / "out" / "verify-thm1-discrete.csv") == slurp(b / "out" / "verify-thm1-discrete.csv"));

  const std::string sweep = R"({"seed": 3, "mc.outer": 500, "sweep.values": [2, 4, 8]})";
  const fs::path c = scratch("repro-c");
  const fs::path d = scratch("repro-d");
  REQUIRE(run_with(c, "sweep", sweep) == kExitPass);
  REQUIRE(run_with(d, "sweep", sweep, "--workers 3") == kExitPass);
  CHECK(slurp(c / "out" / "sweep.csv") == slurp(d / "out" / "sweep.csv"));
  CHECK(slurp(c / "out" / "sweep.svg") == slurp(d / "out" / "sweep.svg"));
}

TEST_CASE("flags override config keys") {
  const fs::path a = scratch("override-a");
  const fs::path b = scratch("override-b");
  REQUIRE(run_with(a, "verify-thm1-discrete", R"({"random.instances": 10, "seed": 1})", "--seed 2") == kExitPass);
  REQUIRE(run_with(b, "verify-thm1-discrete", R"({"random.instances": 10})", "--seed 2") == kExitPass);
  CHECK(slurp(a / "out" / "verify-thm1-discrete.csv") == slurp(b / "out" / "verify-thm1-discrete.csv"));
  const auto manifest = nlohmann::json::parse(slurp(a / "out" / "run.json"));
  CHECK(manifest["seed"] == 2);
}

TEST_CASE("configuration errors exit with 3") {
  const fs::path dir = scratch("config-errors");
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "sweep.bogus": 1})") == kExitConfig);
  CHECK(slurp(dir / "stderr.txt").find("sweep.bogus") != std::string::npos);
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "sweep.values": [8]})") == kExitConfig);
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "sweep.values": [8, 4]})") == kExitConfig);
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "sweep.values": [4, 6.5]})") == kExitConfig);
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "sweep.axis": "d"})") == kExitConfig);
  CHECK(run_with(dir, "sweep", R"({"seed": 1, "problem.kind": "discrete", "problem.n": 5})") == kExitConfig);
  CHECK(run_with(dir, "bounds-compare", R"({"seed": 1, "problem.sigma_sq": -1})") == kExitConfig);
  CHECK(run_with(dir, "bounds-compare", R"({"seed": 1, "problem": {"n": 3}})") == kExitConfig);
  CHECK(run_with(dir, "bounds-compare", R"({"seed": 1, "command": "sweep"})") == kExitConfig);
  CHECK(run_with(dir, "bounds-compare", "{}") == kExitConfig);  // no seed
  CHECK(run_with(dir, "bounds-compare", "{not json") == kExitConfig);
  CHECK(run_with(dir, "verify-thm1-discrete", R"({"seed": 1, "random.max_z": 17})") == kExitConfig);
  CHECK(run_with(dir, "verify-thm1-gaussian", R"({"seed": 1, "problem.mu": [0, 0, 0]})") == kExitConfig);
  CHECK(gibbslab("no-such-command --seed 1", dir) == kExitConfig);
  CHECK(gibbslab("sweep --seed 1 --config /nonexistent.json", dir) == kExitConfig);
  CHECK(gibbslab("sweep --seed 1 --workers 0", dir) == kExitConfig);
  CHECK(gibbslab("--help", dir) == kExitPass);
}

TEST_CASE("state spaces over the enumeration cap exit with 3") {
  const fs::path dir = scratch("state-space");
  const std::string config = R"({"seed": 1, "problem.kind": "discrete", "problem.n": 4,
    "problem.pz": [0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625,
                   0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625],
    "problem.prior": [0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625,
                      0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625, 0.0625],
    "problem.loss": [[0,1,1,1,1,1,1,1,1,1,1,1,1,1,1,1],[1,0,1,1,1,1,1,1,1,1,1,1,1,1,1,1],
                     [1,1,0,1,1,1,1,1,1,1,1,1,1,1,1,1],[1,1,1,0,1,1,1,1,1,1,1,1,1,1,1,1],
                     [1,1,1,1,0,1,1,1,1,1,1,1,1,1,1,1],[1,1,1,1,1,0,1,1,1,1,1,1,1,1,1,1],
                     [1,1,1,1,1,1,0,1,1,1,1,1,1,1,1,1],[1,1,1,1,1,1,1,0,1,1,1,1,1,1,1,1],
                     [1,1,1,1,1,1,1,1,0,1,1,1,1,1,1,1],[1,1,1,1,1,1,1,1,1,0,1,1,1,1,1,1],
                     [1,1,1,1,1,1,1,1,1,1,0,1,1,1,1,1],[1,1,1,1,1,1,1,1,1,1,1,0,1,1,1,1],
                     [1,1,1,1,1,1,1,1,1,1,1,1,0,1,1,1],[1,1,1,1,1,1,1,1,1,1,1,1,1,0,1,1],
                     [1,1,1,1,1,1,1,1,1,1,1,1,1,1,0,1],[1,1,1,1,1,1,1,1,1,1,1,1,1,1,1,0]]})";
  CHECK(run_with(dir, "bounds-compare", config) == kExitConfig);
}

TEST_CASE("Langevin divergence exits with 4") {
  const fs::path dir = scratch("divergence");
  CHECK(run_with(dir, "sgld-converge", R"({"seed": 1, "chain.step_size": 1.0, "chain.steps": 2000})") == kExitDivergence);
}

TEST_CASE("a Monte Carlo disagreement exits with 2") {
  // With 100 outer draws this seed lands more than 3 SE from the exact value.
  const fs::path dir = scratch("assertion");
  CHECK(run_with(dir, "verify-thm1-gaussian", R"({"seed": 6, "mc.outer": 100})") == kExitAssertion);
  CHECK(slurp(dir / "stderr.txt").find("FAIL") != std::string::npos);
  const auto rows = lines(dir / "out" / "verify-thm1-gaussian.csv");
  REQUIRE(rows.size() == 2);
  CHECK(split(rows[1]).back() == "false");
}

TEST_CASE("alpha = 0 gives a residual of exactly zero") {
  const fs::path dir = scratch("alpha-zero");
  REQUIRE(run_with(dir, "verify-thm1-discrete", R"({"seed": 8, "random.instances": 25, "random.alphas": [0]})") ==
          kExitPass);
  const auto rows = lines(dir / "out" / "verify-thm1-discrete.csv");
  REQUIRE(rows.size() == 26);
  const auto header = split(rows[0]);
  CHECK(header.back() == "residual");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    CHECK(cells[4] == "0");  // alpha
    CHECK(cells[5] == "0");  // gen
    CHECK(cells[6] == "0");  // mutual
    CHECK(cells[7] == "0");  // lautum
    CHECK(cells.back() == "0");
  }
}

TEST_CASE("sweep output: slope footer, absent cells and the chart") {
  const fs::path dir = scratch("sweep-shape");
  REQUIRE(run_with(dir, "sweep", R"({"seed": 4})") == kExitPass);
  const auto rows = lines(dir / "out" / "sweep.csv");
  REQUIRE(rows.size() == 1 + 32 + 1);
  const auto header = split(rows[0]);
  CHECK(header[0] == "axis");
  CHECK(header[2] == "exact_gen");
  CHECK(split(rows[1])[1] == "4");
  CHECK(split(rows[1])[2] == "0.8");  // 2 d / (n + 1) at d = 2, n = 4
  const auto footer = split(rows.back());
  CHECK(footer[0] == "slope");
  const double gen_slope = std::stod(footer[2]);
  CHECK(gen_slope <= -0.95);
  CHECK(gen_slope >= -1.05);
  // squared loss is unbounded: the [0, 1] bounds stay empty
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "dp" || header[c] == "raginsky" || header[c] == "mc_gen") CHECK(split(rows[1])[c].empty());
  }
  const std::string svg = slurp(dir / "out" / "sweep.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("exact_gen") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "sweep.svg.tmp"));
}

TEST_CASE("discrete sweep over alpha fills the bounded-loss bounds") {
  const fs::path dir = scratch("sweep-discrete");
  REQUIRE(run_with(dir, "sweep", R"({"seed": 4, "problem.kind": "discrete", "sweep.axis": "alpha"})") == kExitPass);
  const auto rows = lines(dir / "out" / "sweep.csv");
  const auto header = split(rows[0]);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "dp" || header[c] == "raginsky" || header[c] == "thm2") CHECK_FALSE(split(rows[1])[c].empty());
    if (header[c] == "ismi_derived") CHECK(split(rows[1])[c].empty());
  }
}

TEST_CASE("bounds-compare flags every guaranteed bound as dominating") {
  const fs::path dir = scratch("bounds-compare");
  REQUIRE(run_with(dir, "bounds-compare", R"({"seed": 1})") == kExitPass);
  const auto rows = lines(dir / "out" / "bounds-compare.csv");
  bool saw_ismi = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    if (cells[0] == "ismi_printed") {
      saw_ismi = true;
      CHECK(cells[5] == "false");
    }
    if (cells[5] == "true" && !cells[1].empty()) CHECK(cells[4] == "true");
  }
  CHECK(saw_ismi);
}

TEST_CASE("in-process run maps errors to exit codes") {
  std::ostringstream log;
  CHECK(run("sweep", Config::from_json({{"seed", 1}, {"out", scratch("inproc").string()}, {"sweep.values", {1}}}), log) ==
        kExitConfig);
  CHECK(run("nope", Config::from_json({{"seed", 1}}), log) == kExitConfig);
  CHECK(log.str().find("unknown command") != std::string::npos);
}
