#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "splitlangevin/error.hpp"
#include "splitlangevin/experiments.hpp"

using namespace splitlangevin;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("splitlangevin_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> body_lines(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& l : read_lines(p)) {
    if (l.rfind("# generated=", 0) != 0) out.push_back(l);
  }
  return out;
}

std::vector<std::string> data_rows(const fs::path& p) {
  std::vector<std::string> out;
  for (const auto& l : read_lines(p)) {
    if (!l.empty() && l[0] != '#') out.push_back(l);
  }
  return out;
}

}  // namespace

TEST_CASE("parse_real") {
  CHECK(parse_real("2^-10") == std::ldexp(1.0, -10));
  CHECK(parse_real(" 0.25 ") == 0.25);
  CHECK(parse_real("1e-3") == 1e-3);
  CHECK_THROWS_AS(parse_real("abc"), Error);
  CHECK_THROWS_AS(parse_real("1.0x"), Error);
}

TEST_CASE("RunConfig parsing") {
  const RunConfig cfg = RunConfig::parse(
      "# comment line\n"
      "experiment = strong-order\n"
      "taus = 2^-6, 2^-7,2^-8   # trailing comment\n"
      "\n"
      "paths=10\n"
      "paths = 12\n");
  CHECK(cfg.get_string("experiment", "") == "strong-order");
  CHECK(cfg.get_int("paths", 0) == 12);
  CHECK(cfg.entries().size() == 3);
  const auto taus = cfg.get_doubles("taus", {});
  REQUIRE(taus.size() == 3);
  CHECK(taus[2] == std::ldexp(1.0, -8));
  CHECK(cfg.get_double("missing", 4.5) == 4.5);
  CHECK_FALSE(cfg.has("missing"));
  CHECK_THROWS_AS(RunConfig::parse("no equals sign\n"), Error);
  CHECK_THROWS_AS(RunConfig::parse(" = value\n"), Error);
  RunConfig bad;
  bad.set("paths", "1.5");
  CHECK_THROWS_AS(bad.get_int("paths", 0), Error);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/config.txt"), Error);
}

TEST_CASE("every experiment name is registered") {
  const auto& names = experiment_names();
  CHECK(names.size() == 12);
  for (const char* n : {"simulate", "strong-order", "weak-order", "long-time-error",
                        "ergodic-average", "histogram", "msd", "exp-moment", "lyapunov",
                        "jacobian", "phase-area", "dissipation-demo"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
}

TEST_CASE("simulate with zero steps writes only the initial row") {
  const fs::path out = scratch_dir("sim0");
  RunConfig cfg;
  cfg.set("experiment", "simulate");
  cfg.set("T", "0");
  cfg.set("out", out.string());
  const RunSummary s = run_experiment(cfg);
  CHECK(s.experiment == "simulate");
  const auto rows = data_rows(out / "trajectory.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "t,p,q");
  CHECK(rows[1] == "0,1,1");
}

TEST_CASE("output headers and reproducibility") {
  const fs::path a = scratch_dir("repro_a");
  const fs::path b = scratch_dir("repro_b");
  RunConfig cfg;
  cfg.set("experiment", "simulate");
  cfg.set("T", "0.25");
  cfg.set("tau", "2^-6");
  cfg.set("seed", "9");
  cfg.set("out", a.string());
  (void)run_experiment(cfg);
  cfg.set("out", b.string());
  (void)run_experiment(cfg);
  auto la = body_lines(a / "trajectory.csv");
  auto lb = body_lines(b / "trajectory.csv");
  // drop the echoed output directory, which differs by construction
  std::erase_if(la, [](const std::string& l) { return l.rfind("# config out", 0) == 0; });
  std::erase_if(lb, [](const std::string& l) { return l.rfind("# config out", 0) == 0; });
  CHECK(la == lb);
  const auto header = read_lines(a / "trajectory.csv");
  bool found = false;
  for (const auto& l : header) {
    if (l.find("scheme=SAVF") != std::string::npos) {
      found = true;
      CHECK(l.find("upsilon=10") != std::string::npos);
      CHECK(l.find("sigma=1") != std::string::npos);
      CHECK(l.find("tau=0.015625") != std::string::npos);
      CHECK(l.find("T=0.25") != std::string::npos);
      CHECK(l.find("seed=9") != std::string::npos);
    }
  }
  CHECK(found);
  CHECK(data_rows(a / "trajectory.csv").size() == 18);
  std::ifstream raw(a / "trajectory.csv", std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(raw)), std::istreambuf_iterator<char>());
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("strong-order writes one row per level and a summary") {
  const fs::path out = scratch_dir("strong");
  RunConfig cfg;
  cfg.set("experiment", "strong-order");
  cfg.set("paths", "40");
  cfg.set("reference_tau", "2^-11");
  cfg.set("out", out.string());
  const RunSummary s = run_experiment(cfg);
  CHECK(data_rows(out / "strong-order.csv").size() == 6);
  CHECK(data_rows(out / "strong-order.csv")[0] == "tau,error,std_error");
  std::ifstream is(out / "summary.json");
  const auto j = nlohmann::json::parse(is);
  CHECK(j["experiment"] == "strong-order");
  CHECK(j["config"]["paths"] == "40");
  CHECK(j["metrics"].contains("slope"));
  CHECK(j["checks"].is_array());
  CHECK(j["checks"][0].contains("margin"));
  CHECK(s.metrics.at("slope") > 0.5);
}

TEST_CASE("phase-area experiment reaches pi e^-2") {
  const fs::path out = scratch_dir("area");
  RunConfig cfg;
  cfg.set("experiment", "phase-area");
  cfg.set("vertices", "2000");
  cfg.set("out", out.string());
  const RunSummary s = run_experiment(cfg);
  CHECK(s.metrics.at("final_area") == doctest::Approx(std::numbers::pi * std::exp(-2.0)).epsilon(1e-3));
}

TEST_CASE("histogram experiment writes one file per snapshot") {
  const fs::path out = scratch_dir("hist");
  RunConfig cfg;
  cfg.set("experiment", "histogram");
  cfg.set("paths", "64");
  cfg.set("times", "0, 0.5");
  cfg.set("bins", "4");
  cfg.set("tau", "2^-6");
  cfg.set("out", out.string());
  (void)run_experiment(cfg);
  const auto rows = data_rows(out / "histogram_t0.csv");
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == "p_lo,p_hi,q_lo,q_hi,mass");
  CHECK(fs::exists(out / "histogram_t0.5.csv"));
}

TEST_CASE("experiment errors") {
  RunConfig cfg;
  try {
    cfg.set("experiment", "nope");
    (void)run_experiment(cfg);
    FAIL("expected UnknownExperiment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownExperiment);
    const auto j = nlohmann::json::parse(error_record_json(e));
    CHECK(j["error"] == "UnknownExperiment");
  }
  RunConfig none;
  CHECK_THROWS_AS(run_experiment(none), Error);
  RunConfig bad_scheme;
  bad_scheme.set("experiment", "simulate");
  bad_scheme.set("scheme", "SRK4");
  bad_scheme.set("out", scratch_dir("bad").string());
  CHECK_THROWS_AS(run_experiment(bad_scheme), Error);
}

TEST_CASE("run_cli") {
  const fs::path out = scratch_dir("cli");
  const std::string out_s = out.string();
  std::vector<std::string> args{"splitlangevin", "--experiment", "simulate", "--seed", "3",
                                "--out", out_s, "--set", "T=0.125"};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(argv.size()), argv.data()) == 0);
  CHECK(fs::exists(out / "trajectory.csv"));
  CHECK(fs::exists(out / "summary.json"));

  std::vector<std::string> bad{"splitlangevin", "--experiment", "bogus", "--out", out_s};
  std::vector<char*> bargv;
  for (auto& a : bad) bargv.push_back(a.data());
  CHECK(run_cli(static_cast<int>(bargv.size()), bargv.data()) != 0);
}
