#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "latdisp/error.hpp"
#include "latdisp/fitting.hpp"
#include "latdisp/littlewood_paley.hpp"
#include "latdisp/random.hpp"

#ifndef LATDISP_VERSION
#define LATDISP_VERSION "unknown"
#endif

namespace latdisp::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw ComputationError("io_error", "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json error_json(const std::string& code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

json run_decay(const ExperimentConfig& cfg, const DecayConfig& c) {
  const auto records = c.kernel == 'K' ? decay_sweep(c.plans, c.quadrature, cfg.threads)
                                       : decay_sweep_I(c.plans, c.quadrature.tol, cfg.threads);
  std::ostringstream csv;
  csv << "N,k," << (c.kernel == 'K' ? "s" : "t") << ",sup_abs,normalized,Mq_used\n";
  for (const auto& r : records)
    csv << num(r.N.value()) << ',' << r.N.exponent() << ',' << num(r.s) << ',' << num(r.sup_abs) << ',' << num(r.normalized) << ','
        << r.Mq_used << '\n';
  write_text(fs::path(cfg.out_dir) / "decay.csv", csv.str());

  json per_n = json::array();
  for (const auto& plan : c.plans) {
    std::vector<std::pair<double, double>> pts;
    double first = 0.0, peak = 0.0;
    for (const auto& r : records) {
      if (!(r.N == plan.N)) continue;
      if (pts.empty()) first = r.normalized;
      peak = std::max(peak, r.normalized);
      pts.emplace_back(r.s, r.sup_abs);
    }
    json e = {{"N", plan.N.value()}, {"points", pts.size()}, {"first_normalized", first},
              {"max_normalized", peak}, {"max_over_first", first > 0.0 ? peak / first : 0.0}};
    if (pts.size() >= 3) {
      const auto fit = fit_loglog_slope(pts);
      e["slope"] = fit.slope;
      e["slope_residual"] = fit.residual;
    }
    per_n.push_back(e);
  }
  return {{"kernel", std::string(1, c.kernel)}, {"per_N", per_n}};
}

json run_strichartz(const ExperimentConfig& cfg, const StrichartzConfig& c) {
  StrichartzOptions opt;
  opt.samples = c.samples;
  opt.threads = cfg.threads;
  const auto reports = strichartz_sweep(c.profile, c.targets, c.h_list, c.T, opt);
  std::ostringstream csv;
  csv << "pair_q,pair_r,h,ratio,data_norm\n";
  json list = json::array();
  for (const auto& rep : reports) {
    const std::string data = rep.target.sobolev_data ? "H2" : "L2";
    for (std::size_t i = 0; i < rep.h.size(); ++i)
      csv << rep.target.pair.q.to_string() << ',' << rep.target.pair.r.to_string() << ',' << num(rep.h[i]) << ','
          << num(rep.ratios[i]) << ',' << data << '\n';
    list.push_back({{"q", rep.target.pair.q.to_string()},
                    {"r", rep.target.pair.r.to_string()},
                    {"data_norm", data},
                    {"trend_slope", rep.trend_slope},
                    {"trend_residual", rep.trend_residual},
                    {"max_over_min", rep.max_over_min},
                    {"ratios", rep.ratios},
                    {"ratios_doubled_T", rep.ratios_doubled}});
  }
  write_text(fs::path(cfg.out_dir) / "strichartz.csv", csv.str());
  return {{"T", c.T}, {"samples", c.samples}, {"reports", list}};
}

json run_limit(const ExperimentConfig& cfg, const LimitConfig& c) {
  const auto rep = c.discretization_only
                       ? discretization_error_study(c.profile, c.h_list, c.reference.points_per_axis)
                       : run_limit_experiment(c.profile, c.params, c.T, c.h_list, c.reference, c.tau, cfg.threads);
  std::ostringstream csv;
  csv << "h,error,order_increment\n";
  for (std::size_t i = 0; i < rep.h.size(); ++i)
    csv << num(rep.h[i]) << ',' << num(rep.errors[i]) << ',' << num(rep.order_increments[i]) << '\n';
  write_text(fs::path(cfg.out_dir) / "limit.csv", csv.str());
  return {{"fitted_order", rep.fitted_order},
          {"prefactor", rep.prefactor},
          {"residual", rep.residual},
          {"T", c.discretization_only ? 0.0 : c.T},
          {"lambda", c.params.lambda},
          {"p", c.params.p},
          {"tau", rep.tau},
          {"monotone", rep.monotone},
          {"bounded_by_prefactor", rep.bounded_by_prefactor},
          {"non_asymptotic", rep.non_asymptotic},
          {"reference_space_error", rep.reference_space_error},
          {"reference_time_error", rep.reference_time_error}};
}

json run_lp(const ExperimentConfig& cfg, const LpConfig& c) {
  std::ostringstream csv;
  csv << "h,M,min_ratio,max_ratio,bracket\n";
  std::vector<double> brackets;
  for (double h : c.h_list) {
    const LatticeGrid grid(2, static_cast<int>(std::lround(c.period / h)), h);
    const auto b = square_function_bracket(grid, c.p, c.count, cfg.seed);
    brackets.push_back(b.max_ratio / b.min_ratio);
    csv << num(h) << ',' << grid.points_per_axis() << ',' << num(b.min_ratio) << ',' << num(b.max_ratio) << ',' << num(brackets.back()) << '\n';
  }
  write_text(fs::path(cfg.out_dir) / "lp.csv", csv.str());
  const auto [lo, hi] = std::minmax_element(brackets.begin(), brackets.end());
  return {{"p", c.p}, {"count", c.count}, {"max_bracket", *hi}, {"h_variation", *hi / *lo}};
}

json run_gns(const ExperimentConfig& cfg, const GnsConfig& c) {
  const LatticeGrid grid(2, c.M, c.h);
  SplitMix64 rng(cfg.seed);
  std::ostringstream csv;
  csv << "sample,ratio\n";
  double lo = kInf, hi = 0.0;
  for (int i = 0; i < c.count; ++i) {
    const auto f = random_band_limited_field(grid, c.max_mode, rng);
    const double r = gns_ratio(f, c.q, c.s);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    csv << i << ',' << num(r) << '\n';
  }
  write_text(fs::path(cfg.out_dir) / "gns.csv", csv.str());
  return {{"q", c.q}, {"s", c.s}, {"theta", gns_theta(c.q, c.s)}, {"min_ratio", lo}, {"max_ratio", hi}};
}

json run_solve(const ExperimentConfig& cfg, const SolveConfig& c) {
  const LatticeGrid grid(2, c.M, c.profile.period / c.M);
  const auto f0 = discretize(c.profile, grid);
  SolveOptions opt;
  opt.sample_every = c.sample_every;
  opt.keep_snapshots = c.snapshots;
  const auto traj = solve(f0, c.T, c.tau, c.params, c.kind, opt);
  export_trajectory(traj, cfg.out_dir);
  const auto& d0 = traj.diagnostics.front();
  const auto& d1 = traj.diagnostics.back();
  return {{"steps", traj.steps.back()},
          {"kind", to_string(c.kind)},
          {"mass_initial", d0.mass},
          {"mass_final", d1.mass},
          {"energy_initial", d0.energy},
          {"energy_final", d1.energy},
          {"linf_final", d1.linf}};
}

int fail(const fs::path* out_dir, const std::string& code, const std::string& message) {
  const auto j = error_json(code, message);
  std::cerr << j.dump() << '\n';
  if (out_dir) {
    try {
      write_json(*out_dir / "error.json", j);
    } catch (...) {
    }
  }
  return 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Lattice fourth-order Schrodinger experiments", "latdisp"};
  std::string command, config_path;
  Overrides ov;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("command", command, "decay | strichartz | limit | lp | gns | solve")->required();
  app.add_option("--config", config_path, "JSON config file")->required();
  auto* out_opt = app.add_option("--out", out, "output directory (default $LATDISP_OUT)");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed for random ensembles");
  app.add_flag_callback("--version", [] {
    std::cout << "latdisp " << LATDISP_VERSION << '\n';
    throw CLI::Success();
  });
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (*out_opt) ov.out = out;
  if (*threads_opt) ov.threads = threads;
  if (*seed_opt) ov.seed = seed;

  json raw;
  {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << error_json("config_unreadable", "cannot open " + config_path).dump() << '\n';
      return 2;
    }
    try {
      raw = json::parse(is);
    } catch (const json::parse_error& e) {
      std::cerr << error_json("config_parse_error", e.what()).dump() << '\n';
      return 2;
    }
  }
  auto v = validate_config(command, raw, ov);
  if (!v.config) {
    json j = {{"error", "invalid_config"}, {"violations", v.violations}};
    for (const auto& s : v.violations) std::cerr << "config error: " << s << '\n';
    std::cerr << j.dump() << '\n';
    return 2;
  }
  const auto& cfg = *v.config;
  const fs::path dir(cfg.out_dir);
  try {
    fs::create_directories(dir);
    write_json(dir / "manifest.json", {{"tool", "latdisp"},
                                       {"version", LATDISP_VERSION},
                                       {"command", cfg.command},
                                       {"config", cfg.resolved}});
    const json summary = std::visit(
        [&](const auto& body) -> json {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, DecayConfig>) return run_decay(cfg, body);
          if constexpr (std::is_same_v<T, StrichartzConfig>) return run_strichartz(cfg, body);
          if constexpr (std::is_same_v<T, LimitConfig>) return run_limit(cfg, body);
          if constexpr (std::is_same_v<T, LpConfig>) return run_lp(cfg, body);
          if constexpr (std::is_same_v<T, GnsConfig>) return run_gns(cfg, body);
          if constexpr (std::is_same_v<T, SolveConfig>) return run_solve(cfg, body);
        },
        cfg.body);
    write_json(dir / "summary.json", summary);
  } catch (const ComputationError& e) {
    return fail(&dir, e.code(), e.what());
  } catch (const PreconditionError& e) {
    return fail(&dir, "precondition_failed", e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(nullptr, "io_error", e.what());
  } catch (const std::exception& e) {
    return fail(&dir, "internal_error", e.what());
  }
  return 0;
}

}  // namespace latdisp::cli
