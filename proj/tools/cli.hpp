#pragma once
// Config-driven experiment runner behind the `latdisp` executable.
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "latdisp/continuum_limit.hpp"
#include "latdisp/oscillatory.hpp"
#include "latdisp/solvers.hpp"
#include "latdisp/strichartz.hpp"

namespace latdisp::cli {

using json = nlohmann::json;

struct DecayConfig {
  char kernel = 'K';  // 'K' or 'I'
  std::vector<DecayPlan> plans;
  QuadratureSpec quadrature;
};

struct StrichartzConfig {
  ContinuumFunction profile;
  std::vector<StrichartzTarget> targets;
  std::vector<double> h_list;
  double T = 10.0;
  int samples = 512;
};

struct LimitConfig {
  ContinuumFunction profile;
  NonlinearityParams params;
  double T = 1.0;
  std::vector<double> h_list;
  ReferenceSpec reference;
  double tau = 0.0;
  bool discretization_only = false;
};

struct LpConfig {
  double period = 64.0;  // grids keep this period, so M = period / h
  std::vector<double> h_list;
  double p = 4.0;
  int count = 100;
};

struct GnsConfig {
  int M = 64;
  double h = 1.0;
  double q = 4.0;
  double s = 2.0;
  int count = 100;
  int max_mode = 8;
};

struct SolveConfig {
  ContinuumFunction profile;
  int M = 64;
  NonlinearityParams params;
  FlowKind kind = FlowKind::discrete;
  double T = 1.0;
  double tau = 0.0;
  long sample_every = 100;
  bool snapshots = true;
};

struct ExperimentConfig {
  std::string command;
  std::string out_dir;
  int threads = 1;
  std::uint64_t seed = 0;
  json resolved;  // raw config with every default filled in
  std::variant<DecayConfig, StrichartzConfig, LimitConfig, LpConfig, GnsConfig, SolveConfig> body;
};

struct Overrides {
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> violations;  // every problem found, each naming its key
};

/// Typed config for `command`, or the full list of violations.
Validation validate_config(const std::string& command, const json& raw, const Overrides& overrides = {});

/// Parses argv, runs the subcommand and returns the exit code:
/// 0 success, 2 invalid config or usage, 1 runtime failure (error.json written).
int run(int argc, const char* const* argv);

const std::vector<std::string>& commands();

}  // namespace latdisp::cli
