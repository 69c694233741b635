#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace latdisp;
using latdisp::cli::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("latdisp_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "latdisp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("minimal decay config gets documented defaults") {
  const auto v = cli::validate_config("decay", json::object());
  REQUIRE(v.config);
  const auto& c = std::get<cli::DecayConfig>(v.config->body);
  CHECK(c.plans.size() == 5);
  CHECK(c.plans.front().N.value() == 0.5);
  CHECK(c.plans.back().N.value() == 1.0 / 32);
  CHECK(c.quadrature.tol == 1e-8);
  CHECK(v.config->resolved["max_M"] == 4096);
  CHECK(v.config->threads == 1);
}

TEST_CASE("every violation is reported") {
  const auto v = cli::validate_config("solve", json{{"M", 60}, {"lambda", -1.0}, {"p", 6.0}});
  CHECK_FALSE(v.config);
  CHECK(v.violations.size() == 2);
  CHECK(mentions(v.violations, "M:"));
  CHECK(mentions(v.violations, "1 < p < 5"));
  const auto p = cli::validate_config("limit", json{{"p", 0.5}});
  CHECK(mentions(p.violations, "p > 1"));
  const auto u = cli::validate_config("lp", json{{"typo", 1}});
  CHECK(mentions(u.violations, "typo: unknown key"));
  const auto s = cli::validate_config("decay", json{{"N_list", {0.5}}, {"s_list", {10.0, 5000.0}}});
  CHECK(mentions(s.violations, "s_list"));
  const auto pr = cli::validate_config("strichartz", json{{"pairs", {{4, 4}}}});
  CHECK(mentions(pr.violations, "not admissible"));
  const auto w = cli::validate_config("limit", json{{"profile", {{"width", 5.0}}}});
  CHECK(mentions(w.violations, "profile.width"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run({"solve", "--config", write_config(dir, R"({"p": 0.5})").string(), "--out", (dir / "o").string()}) == 2);
  CHECK(run({"solve", "--config", write_config(dir, "{not json").string()}) == 2);
  CHECK(run({"solve", "--config", (dir / "missing.json").string()}) == 2);
  CHECK(run({"bogus", "--config", write_config(dir, "{}").string(), "--out", (dir / "o").string()}) == 2);
  CHECK(run({"solve"}) == 2);
}

TEST_CASE("decay run writes one row per point and is deterministic") {
  const auto dir = scratch("decay");
  const auto cfg = write_config(dir, R"({"N_list": [0.25], "s_list": [10, 20]})");
  REQUIRE(run({"decay", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"decay", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "1"}) == 0);
  const auto csv = slurp(dir / "a" / "decay.csv");
  CHECK(csv == slurp(dir / "b" / "decay.csv"));
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "N,k,s,sup_abs,normalized,Mq_used");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 2);
  const auto manifest = json::parse(slurp(dir / "a" / "manifest.json"));
  CHECK(manifest["command"] == "decay");
  CHECK(manifest["config"]["tol"] == 1e-8);
  CHECK(manifest.contains("version"));
  CHECK(fs::exists(dir / "a" / "summary.json"));
}

TEST_CASE("unconverged reference exits 1 with an error document") {
  const auto dir = scratch("limit");
  const auto cfg = write_config(dir, R"({
    "period": 24, "lambda": 1, "p": 3, "T": 1,
    "profile": {"type": "gaussian", "center": [12, 12], "width": 2, "amplitude": [3, 0]},
    "h_list": [6, 3, 1.5],
    "reference": {"M": 64, "tau": 0.5}
  })");
  CHECK(run({"limit", "--config", cfg.string(), "--out", (dir / "o").string()}) == 1);
  const auto err = json::parse(slurp(dir / "o" / "error.json"));
  CHECK(err["error"] == "reference_unconverged");
}

TEST_CASE("output directory falls back to LATDISP_OUT") {
  const auto dir = scratch("env");
  setenv("LATDISP_OUT", (dir / "env_out").string().c_str(), 1);
  const auto v = cli::validate_config("gns", json::object());
  unsetenv("LATDISP_OUT");
  REQUIRE(v.config);
  CHECK(v.config->out_dir == (dir / "env_out").string());
  const auto o = cli::validate_config("gns", json::object(), {.out = std::string("x")});
  CHECK(o.config->out_dir == "x");
}

TEST_CASE("small runs of every other command") {
  const auto dir = scratch("all");
  CHECK(run({"lp", "--config", write_config(dir, R"({"period": 16, "h_list": [1, 0.5], "count": 5})").string(),
             "--out", (dir / "lp").string()}) == 0);
  CHECK(fs::exists(dir / "lp" / "lp.csv"));
  CHECK(run({"gns", "--config", write_config(dir, R"({"M": 16, "count": 5, "max_mode": 4})").string(), "--out",
             (dir / "gns").string(), "--seed", "7"}) == 0);
  CHECK(fs::exists(dir / "gns" / "gns.csv"));
  CHECK(run({"solve", "--config", write_config(dir, R"({"M": 16, "T": 0.01, "tau": 0.001, "sample_every": 5, "lambda": 1})").string(),
             "--out", (dir / "solve").string()}) == 0);
  CHECK(fs::exists(dir / "solve" / "manifest.csv"));
  CHECK(fs::exists(dir / "solve" / "snapshot_00000010.ldsp"));
  CHECK(run({"strichartz",
             "--config", write_config(dir, R"({"h_list": [1, 0.5, 0.25], "samples": 16, "T": 1})").string(), "--out",
             (dir / "st").string()}) == 0);
  const auto csv = slurp(dir / "st" / "strichartz.csv");
  CHECK(csv.rfind("pair_q,pair_r,h,ratio", 0) == 0);
  CHECK(run({"limit", "--config", write_config(dir, R"({"mode": "discretization", "h_list": [3, 1.5, 0.75], "reference": {"M": 128}})").string(),
             "--out", (dir / "lim").string()}) == 0);
  CHECK(slurp(dir / "lim" / "limit.csv").rfind("h,error,order_increment", 0) == 0);
}
