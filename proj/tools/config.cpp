#include <cmath>
#include <cstdlib>
#include <set>

#include "cli.hpp"
#include "latdisp/error.hpp"

namespace latdisp::cli {

namespace {

bool power_of_two(long m) { return m > 0 && (m & (m - 1)) == 0; }

// Reads keys from one JSON object, fills defaults into it and collects
// violations instead of stopping at the first.
class Reader {
 public:
  Reader(json& obj, std::vector<std::string>& errs, std::string prefix = "")
      : obj_(obj), errs_(errs), prefix_(std::move(prefix)) {}

  std::string name(const std::string& key) const { return prefix_ + key; }
  bool has(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key);
  }
  void fail(const std::string& key, const std::string& msg) { errs_.push_back(name(key) + ": " + msg); }
  void check(bool ok, const std::string& key, const std::string& msg) {
    if (!ok) fail(key, msg);
  }

  double number(const std::string& key, double def) {
    if (!has(key)) {
      obj_[key] = def;
      return def;
    }
    const auto& v = obj_[key];
    if (!v.is_number()) {
      fail(key, "expected a number");
      return def;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  long integer(const std::string& key, long def) {
    if (!has(key)) {
      obj_[key] = def;
      return def;
    }
    const auto& v = obj_[key];
    if (v.is_number_integer()) return v.get<long>();
    if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>() &&
        std::abs(v.get<double>()) < 9e15)
      return static_cast<long>(v.get<double>());
    fail(key, "expected an integer");
    return def;
  }

  std::vector<double> numbers(const std::string& key, const std::vector<double>& def) {
    if (!has(key)) {
      obj_[key] = def;
      return def;
    }
    const auto& v = obj_[key];
    std::vector<double> out;
    if (!v.is_array() || v.empty()) {
      fail(key, "expected a non-empty array of numbers");
      return def;
    }
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        fail(key, "expected a non-empty array of numbers");
        return def;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::string string(const std::string& key, const std::string& def) {
    if (!has(key)) {
      obj_[key] = def;
      return def;
    }
    if (!obj_[key].is_string()) {
      fail(key, "expected a string");
      return def;
    }
    return obj_[key].get<std::string>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) {
      obj_[key] = def;
      return def;
    }
    if (!obj_[key].is_boolean()) {
      fail(key, "expected true or false");
      return def;
    }
    return obj_[key].get<bool>();
  }

  json& object(const std::string& key, const json& def) {
    if (!has(key)) obj_[key] = def;
    if (!obj_[key].is_object()) {
      fail(key, "expected an object");
      obj_[key] = def;
    }
    return obj_[key];
  }

  json& raw(const std::string& key, const json& def) {
    if (!has(key)) obj_[key] = def;
    return obj_[key];
  }

  Reader child(json& obj, const std::string& key) { return Reader(obj, errs_, prefix_ + key + "."); }

  void reject_unknown() {
    for (const auto& [k, v] : obj_.items())
      if (!used_.count(k)) fail(k, "unknown key");
  }

 private:
  json& obj_;
  std::vector<std::string>& errs_;
  std::string prefix_;
  std::set<std::string> used_;
};

std::vector<double> halvings(double first, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(std::ldexp(first, -i));
  return out;
}

void check_h_list(Reader& r, const std::string& key, const std::vector<double>& hs, double period) {
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) {
      r.fail(key, "entries must be positive");
      return;
    }
    if (i > 0 && !(hs[i] < hs[i - 1])) {
      r.fail(key, "must be strictly decreasing");
      return;
    }
    if (period > 0.0) {
      const double m = period / hs[i];
      const long mi = std::lround(m);
      if (std::abs(m - mi) > 1e-9 * m || !power_of_two(mi) || mi < 4) {
        r.fail(key, "period / h must be a power of two >= 4 for every entry");
        return;
      }
    }
  }
}

NonlinearityParams read_params(Reader& r, double lambda_def, double p_def) {
  NonlinearityParams params;
  params.lambda = r.number("lambda", lambda_def);
  params.p = r.number("p", p_def);
  for (const auto& v : params.violations())
    r.fail(v.rfind("lambda must", 0) == 0 ? "lambda" : "p", v);
  return params;
}

ContinuumFunction read_profile(Reader& top, double period, std::uint64_t seed, const json& def) {
  json& obj = top.object("profile", def);
  Reader r = top.child(obj, "profile");
  ContinuumFunction f;
  f.period = period;
  const std::string type = r.string("type", "gaussian");
  if (type == "gaussian") {
    const auto c = r.numbers("center", {period / 2.0, period / 2.0});
    const double w = r.number("width", period / 16.0);
    const auto a = r.numbers("amplitude", {1.0, 0.0});
    r.check(c.size() == 2, "center", "expected two coordinates");
    r.check(a.size() == 2, "amplitude", "expected [re, im]");
    r.check(w > 0.0, "width", "must be positive");
    r.check(period >= 12.0 * w, "width", "period must be at least 12 widths");
    Gaussian g;
    if (c.size() == 2) g.center = {c[0], c[1]};
    g.width = w;
    if (a.size() == 2) g.amplitude = {a[0], a[1]};
    f.shape = g;
  } else if (type == "random") {
    const long count = r.integer("count", 6);
    const double lo = r.number("min_width", period / 32.0);
    const double hi = r.number("max_width", period / 16.0);
    const long s = r.integer("seed", static_cast<long>(seed & 0x7fffffffffffffffULL));
    bool ok = true;
    auto need = [&](bool cond, const std::string& key, const std::string& msg) {
      r.check(cond, key, msg);
      ok = ok && cond;
    };
    need(count >= 1 && count <= 10000, "count", "must lie in [1, 10000]");
    need(lo > 0.0, "min_width", "must be positive");
    need(hi >= lo, "max_width", "must be >= min_width");
    need(period >= 12.0 * hi, "max_width", "period must be at least 12 widths");
    need(s >= 0, "seed", "must be nonnegative");
    if (ok) f = make_random_profile(period, static_cast<int>(count), lo, hi, static_cast<std::uint64_t>(s));
  } else {
    r.fail("type", "must be \"gaussian\" or \"random\"");
  }
  r.reject_unknown();
  return f;
}

Exponent read_exponent(const json& v, Reader& r, const std::string& key, bool& ok) {
  try {
    if (v.is_string()) return Exponent::parse(v.get<std::string>());
    if (v.is_number_integer()) return Exponent::ratio(v.get<long>(), 1);
    if (v.is_number_float()) return Exponent::parse(v.dump());
  } catch (const PreconditionError&) {
  }
  ok = false;
  r.fail(key, "exponents must be >= 1, given as integers, \"a/b\" or \"inf\"");
  return Exponent::infinity();
}

DecayConfig read_decay(Reader& r) {
  DecayConfig c;
  const std::string kernel = r.string("kernel", "K");
  r.check(kernel == "K" || kernel == "I", "kernel", "must be \"K\" or \"I\"");
  c.kernel = kernel == "I" ? 'I' : 'K';
  const auto Ns = r.numbers("N_list", halvings(0.5, 5));
  std::vector<DyadicScale> scales;
  for (double n : Ns) {
    try {
      scales.push_back(DyadicScale::from_value(n));
    } catch (const PreconditionError&) {
      r.fail("N_list", "entries must be dyadic 2^-k <= 1");
      break;
    }
  }
  c.quadrature.tol = r.number("tol", 1e-8);
  c.quadrature.initial_M = static_cast<int>(r.integer("initial_M", 64));
  c.quadrature.max_M = static_cast<int>(r.integer("max_M", 4096));
  r.check(c.quadrature.tol > 0.0 && c.quadrature.tol < 1.0, "tol", "must lie in (0, 1)");
  r.check(power_of_two(c.quadrature.initial_M) && c.quadrature.initial_M >= 16, "initial_M",
          "must be a power of two >= 16");
  r.check(power_of_two(c.quadrature.max_M) && c.quadrature.max_M >= c.quadrature.initial_M, "max_M",
          "must be a power of two >= initial_M");
  if (c.kernel == 'K') {
    const double density = r.number("points_per_decade", 4.0);
    r.check(density > 0.0, "points_per_decade", "must be positive");
    std::vector<double> s_list;
    const bool explicit_s = r.has("s_list");
    if (explicit_s) {
      s_list = r.numbers("s_list", {});
      for (double s : s_list) {
        if (!(s > 0.0)) {
          r.fail("s_list", "entries must be positive");
          break;
        }
      }
      for (const auto& N : scales)
        for (double s : s_list)
          if (s > decay_s_max(N) * (1.0 + 1e-12)) {
            r.fail("s_list", "s = " + std::to_string(s) + " exceeds the budget 16 s N^3 <= 2000 at N = " +
                                 std::to_string(N.value()));
            goto done;
          }
    done:;
    }
    if (density > 0.0)
      for (const auto& N : scales) c.plans.push_back(explicit_s ? DecayPlan{N, s_list} : default_decay_plan(N, density));
  } else {
    const auto tn4 = r.numbers("tN4_list", log_spaced(10.0, 100.0, 5));
    bool ok = true;
    for (double v : tn4) ok = ok && v > 0.0;
    r.check(ok, "tN4_list", "entries must be positive");
    for (const auto& N : scales) {
      DecayPlan plan{N, {}};
      const double n4 = std::pow(N.value(), 4);
      for (double v : tn4) plan.times.push_back(v / n4);
      c.plans.push_back(plan);
    }
  }
  return c;
}

StrichartzConfig read_strichartz(Reader& r, std::uint64_t seed) {
  StrichartzConfig c;
  const double period = r.number("period", 32.0);
  r.check(period > 0.0, "period", "must be positive");
  json gdef = {{"type", "gaussian"}, {"center", {period / 2, period / 2}}, {"width", 2.0}, {"amplitude", {1.0, 0.0}}};
  if (period > 0.0) c.profile = read_profile(r, period, seed, gdef);
  c.h_list = r.numbers("h_list", halvings(1.0, 6));
  check_h_list(r, "h_list", c.h_list, period);
  c.T = r.number("T", 10.0);
  r.check(c.T > 0.0, "T", "must be positive");
  const long samples = r.integer("samples", 512);
  r.check(samples >= 2 && samples <= 1000000, "samples", "must lie in [2, 1e6]");
  c.samples = static_cast<int>(samples);
  json pdef = json::array({json::array({"inf", 2}), json::array({8, 4}), json::array({4, "inf"})});
  const json& pairs = r.raw("pairs", pdef);
  if (!pairs.is_array() || pairs.empty()) {
    r.fail("pairs", "expected a non-empty array of [q, r] pairs");
  } else {
    for (const auto& pr : pairs) {
      if (!pr.is_array() || pr.size() != 2) {
        r.fail("pairs", "expected a non-empty array of [q, r] pairs");
        break;
      }
      bool ok = true;
      StrichartzTarget t;
      t.pair.q = read_exponent(pr[0], r, "pairs", ok);
      t.pair.r = read_exponent(pr[1], r, "pairs", ok);
      if (!ok) break;
      if (!is_admissible(t.pair)) {
        r.fail("pairs", "(" + t.pair.q.to_string() + ", " + t.pair.r.to_string() +
                            ") is not admissible: need q, r >= 2 and 1/q = (1/2)(1/2 - 1/r)");
        continue;
      }
      c.targets.push_back(t);
    }
  }
  if (r.boolean("h2_sup", true))
    c.targets.push_back({{Exponent::infinity(), Exponent::infinity()}, true});
  return c;
}

LimitConfig read_limit(Reader& r, std::uint64_t seed) {
  LimitConfig c;
  const double period = r.number("period", 24.0);
  r.check(period > 0.0, "period", "must be positive");
  json gdef = {{"type", "gaussian"}, {"center", {period / 2, period / 2}}, {"width", 2.0}, {"amplitude", {1.0, 0.0}}};
  if (period > 0.0) c.profile = read_profile(r, period, seed, gdef);
  const std::string mode = r.string("mode", "flow");
  r.check(mode == "flow" || mode == "discretization", "mode", "must be \"flow\" or \"discretization\"");
  c.discretization_only = mode == "discretization";
  c.params = read_params(r, 1.0, 3.0);
  c.T = r.number("T", 1.0);
  r.check(c.T >= 0.0, "T", "must be >= 0");
  c.h_list = r.numbers("h_list", halvings(period / 16.0, 5));
  check_h_list(r, "h_list", c.h_list, period);
  json& ref = r.object("reference", json::object());
  Reader rr = r.child(ref, "reference");
  c.reference.points_per_axis = static_cast<int>(rr.integer("M", 1024));
  c.reference.tau = rr.number("tau", 2.5e-4);
  c.reference.self_error_fraction = rr.number("self_error_fraction", 0.1);
  rr.check(power_of_two(c.reference.points_per_axis) && c.reference.points_per_axis >= 8 &&
               c.reference.points_per_axis <= 8192,
           "M", "must be a power of two in [8, 8192]");
  rr.check(c.reference.tau > 0.0, "tau", "must be positive");
  rr.check(c.reference.self_error_fraction > 0.0, "self_error_fraction", "must be positive");
  rr.reject_unknown();
  if (period > 0.0 && !c.h_list.empty() && c.reference.points_per_axis > 0)
    r.check(period / c.reference.points_per_axis <= c.h_list.back() / 4.0 * (1.0 + 1e-12), "reference.M",
            "reference grid must be at least 4x finer than the smallest h");
  c.tau = r.number("tau", 0.0);
  r.check(c.tau >= 0.0, "tau", "must be >= 0 (0 selects reference.tau)");
  if (!c.discretization_only && c.reference.tau > 0.0) {
    const double step = c.tau > 0.0 ? c.tau : c.reference.tau;
    for (double dt : {step, c.reference.tau, 2.0 * c.reference.tau}) {
      const double n = c.T / dt;
      if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
        r.fail("T", "must be an integer multiple of tau, reference.tau and 2 reference.tau");
        break;
      }
    }
  }
  return c;
}

LpConfig read_lp(Reader& r) {
  LpConfig c;
  c.period = r.number("period", 64.0);
  r.check(c.period > 0.0, "period", "must be positive");
  c.h_list = r.numbers("h_list", halvings(1.0, 4));
  check_h_list(r, "h_list", c.h_list, c.period);
  for (double h : c.h_list)
    if (c.period > 0.0 && c.period / h > 4096.5) {
      r.fail("h_list", "period / h must not exceed 4096");
      break;
    }
  c.p = r.number("p", 4.0);
  r.check(c.p > 1.0 && std::isfinite(c.p), "p", "must satisfy 1 < p < inf");
  c.count = static_cast<int>(r.integer("count", 100));
  r.check(c.count >= 1 && c.count <= 100000, "count", "must lie in [1, 100000]");
  return c;
}

GnsConfig read_gns(Reader& r) {
  GnsConfig c;
  c.M = static_cast<int>(r.integer("M", 64));
  r.check(power_of_two(c.M) && c.M >= 8 && c.M <= 4096, "M", "must be a power of two in [8, 4096]");
  c.h = r.number("h", 1.0);
  r.check(c.h > 0.0, "h", "must be positive");
  c.q = r.number("q", 4.0);
  c.s = r.number("s", 2.0);
  r.check(c.s > 0.0, "s", "must be positive");
  try {
    if (c.s > 0.0) gns_theta(c.q, c.s);
  } catch (const PreconditionError&) {
    r.fail("q", "need 1/q = 1/2 - theta s / 2 with theta in (0, 1)");
  }
  c.count = static_cast<int>(r.integer("count", 100));
  r.check(c.count >= 1 && c.count <= 100000, "count", "must lie in [1, 100000]");
  c.max_mode = static_cast<int>(r.integer("max_mode", 8));
  r.check(c.max_mode >= 1 && c.max_mode < c.M / 2, "max_mode", "must lie in [1, M/2)");
  return c;
}

SolveConfig read_solve(Reader& r, std::uint64_t seed) {
  SolveConfig c;
  c.M = static_cast<int>(r.integer("M", 64));
  r.check(power_of_two(c.M) && c.M >= 4 && c.M <= 4096, "M", "must be a power of two in [4, 4096]");
  const double h = r.number("h", 1.0);
  r.check(h > 0.0, "h", "must be positive");
  const double period = c.M * h;
  json gdef = {{"type", "gaussian"}, {"center", {period / 2, period / 2}}, {"width", period / 16},
               {"amplitude", {1.0, 0.0}}};
  if (period > 0.0) c.profile = read_profile(r, period, seed, gdef);
  c.params = read_params(r, 0.0, 3.0);
  const std::string kind = r.string("kind", "discrete");
  try {
    c.kind = flow_kind_from_string(kind);
  } catch (const PreconditionError&) {
    r.fail("kind", "must be \"discrete\" or \"continuum\"");
  }
  c.T = r.number("T", 1.0);
  r.check(c.T >= 0.0, "T", "must be >= 0");
  const double def_tau = h > 0.0 ? std::min(1e-3, std::pow(h, 4) / 4.0) : 1e-3;
  c.tau = r.number("tau", def_tau);
  r.check(c.tau > 0.0, "tau", "must be positive");
  if (c.tau > 0.0) {
    const double n = c.T / c.tau;
    r.check(std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, n), "T", "must be an integer multiple of tau");
  }
  c.sample_every = r.integer("sample_every", 100);
  r.check(c.sample_every >= 1, "sample_every", "must be >= 1");
  c.snapshots = r.boolean("snapshots", true);
  return c;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"decay", "strichartz", "limit", "lp", "gns", "solve"};
  return names;
}

Validation validate_config(const std::string& command, const json& raw, const Overrides& overrides) {
  Validation out;
  auto& errs = out.violations;
  if (!raw.is_object()) {
    errs.push_back("config: top level must be a JSON object");
    return out;
  }
  ExperimentConfig cfg;
  cfg.command = command;
  cfg.resolved = raw;
  Reader r(cfg.resolved, errs);
  if (overrides.threads) cfg.resolved["threads"] = *overrides.threads;
  if (overrides.seed) cfg.resolved["seed"] = *overrides.seed;
  if (overrides.out) cfg.resolved["out"] = *overrides.out;
  const long threads = r.integer("threads", 1);
  r.check(threads >= 1 && threads <= 1024, "threads", "must lie in [1, 1024]");
  cfg.threads = static_cast<int>(threads);
  if (r.has("seed")) {
    const auto& v = cfg.resolved["seed"];
    if (v.is_number_unsigned())
      cfg.seed = v.get<std::uint64_t>();
    else if (v.is_number_integer() && v.get<long long>() >= 0)
      cfg.seed = static_cast<std::uint64_t>(v.get<long long>());
    else
      r.fail("seed", "must be a nonnegative integer");
  } else {
    cfg.resolved["seed"] = 0;
  }
  const char* env = std::getenv("LATDISP_OUT");
  cfg.out_dir = r.string("out", env && *env ? env : "latdisp_out");
  r.check(!cfg.out_dir.empty(), "out", "must not be empty");

  if (command == "decay") {
    cfg.body = read_decay(r);
  } else if (command == "strichartz") {
    cfg.body = read_strichartz(r, cfg.seed);
  } else if (command == "limit") {
    cfg.body = read_limit(r, cfg.seed);
  } else if (command == "lp") {
    cfg.body = read_lp(r);
  } else if (command == "gns") {
    cfg.body = read_gns(r);
  } else if (command == "solve") {
    cfg.body = read_solve(r, cfg.seed);
  } else {
    errs.push_back("command: unknown subcommand '" + command + "'");
    return out;
  }
  r.reject_unknown();
  if (errs.empty()) out.config = std::move(cfg);
  return out;
}

}  // namespace latdisp::cli
