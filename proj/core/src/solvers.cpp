#include "latdisp/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "fft.hpp"
#include "latdisp/error.hpp"
#include "latdisp/snapshot.hpp"

namespace latdisp {

using detail::require;

std::string to_string(FlowKind kind) {
  return kind == FlowKind::discrete ? "discrete" : "continuum";
}

FlowKind flow_kind_from_string(const std::string& name) {
  if (name == "discrete") return FlowKind::discrete;
  if (name == "continuum") return FlowKind::continuum;
  throw PreconditionError("flow kind must be \"discrete\" or \"continuum\", got \"" + name + "\"");
}

std::vector<std::string> NonlinearityParams::violations() const {
  std::vector<std::string> out;
  if (!std::isfinite(lambda)) out.push_back("lambda must be finite");
  if (!(std::isfinite(p) && p > 1.0)) out.push_back("p must satisfy p > 1");
  if (lambda < 0.0 && std::isfinite(p) && p >= 5.0)
    out.push_back("lambda < 0 requires 1 < p < 5 (global existence window)");
  return out;
}

void NonlinearityParams::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = "invalid nonlinearity:";
  for (const auto& s : v) msg += " " + s + ";";
  throw PreconditionError(msg);
}

namespace {

std::vector<double> quartic_symbol(const LatticeGrid& grid, FlowKind kind) {
  auto base = kind == FlowKind::discrete ? symbol_sigma(grid) : symbol_xi_squared(grid);
  for (auto& v : base.values) v *= v;
  return std::move(base.values);
}

void rotate(std::span<cplx> u, double tau, const NonlinearityParams& params) {
  if (params.lambda == 0.0 || tau == 0.0) return;
  const double c = -params.lambda * tau;
  const double e = 0.5 * (params.p - 1.0);
  const bool cubic = params.p == 3.0;
  for (auto& z : u) {
    const double n2 = std::norm(z);
    const double m = cubic ? n2 : std::pow(n2, e);
    z *= std::polar(1.0, c * m);
  }
}

bool finite(std::span<const cplx> u) {
  for (cplx z : u)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

// Linear step on a reusable buffer: forward transform, multiply, inverse.
class LinearStep {
 public:
  LinearStep(const LatticeGrid& grid, double tau, FlowKind kind) : grid_(grid) {
    const auto q = quartic_symbol(grid, kind);
    const double norm = 1.0 / static_cast<double>(grid.size());
    phase_.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) phase_[i] = norm * std::polar(1.0, tau * q[i]);
  }

  void apply(CVector& u) const {
    const int d = grid_.dim(), m = grid_.points_per_axis();
    fft::transform(d, m, -1, u.data(), u.data());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= phase_[i];
    fft::transform(d, m, +1, u.data(), u.data());
  }

 private:
  LatticeGrid grid_;
  CVector phase_;
};

long step_count(double T, double tau) {
  require(std::isfinite(T) && std::isfinite(tau), "solve: T and tau must be finite");
  require(tau != 0.0, "solve: tau must be nonzero");
  const double ratio = T / tau;
  const double n = std::round(ratio);
  require(n >= 0.0, "solve: T and tau must have the same sign");
  require(std::abs(ratio - n) <= 1e-9 * std::max(1.0, n),
          "solve: T must be an integer multiple of tau");
  return static_cast<long>(n);
}

Diagnostics diagnose(const ComplexField& u, const NonlinearityParams& params, FlowKind kind) {
  return {mass(u), energy(u, params, kind), lp_norm(u, kInf)};
}

}  // namespace

ComplexField linear_propagate(const ComplexField& f, double t, FlowKind kind) {
  require(std::isfinite(t), "linear_propagate: t must be finite");
  const auto q = quartic_symbol(f.grid(), kind);
  ComplexSymbol m{f.grid(), std::vector<cplx>(q.size())};
  for (std::size_t i = 0; i < q.size(); ++i) m.values[i] = std::polar(1.0, t * q[i]);
  return apply_multiplier(f, m);
}

ComplexField nonlinear_phase_step(const ComplexField& f, double tau, const NonlinearityParams& params) {
  params.validate();
  require(std::isfinite(tau), "nonlinear_phase_step: tau must be finite");
  ComplexField out = f;
  rotate(out.values(), tau, params);
  return out;
}

double mass(const ComplexField& f) {
  const double n = lp_norm(f, 2.0);
  return n * n;
}

double energy(const ComplexField& f, const NonlinearityParams& params, FlowKind kind) {
  const auto spec = dft(f);
  const auto q = quartic_symbol(f.grid(), kind);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) acc += q[i] * std::norm(spec[i]);
  const auto& g = f.grid();
  const double quad = acc / std::pow(g.period(), g.dim());
  if (params.lambda == 0.0) return 0.5 * quad;
  const double np = lp_norm(f, params.p + 1.0);
  return 0.5 * quad - params.lambda / (params.p + 1.0) * std::pow(np, params.p + 1.0);
}

double default_time_step(const LatticeGrid& grid) {
  const double h = grid.mesh();
  return std::min(1e-3, 0.25 * h * h * h * h);
}

Trajectory solve(const ComplexField& f0, double T, double tau, const NonlinearityParams& params,
                 FlowKind kind, const SolveOptions& options) {
  params.validate();
  require(options.sample_every >= 1, "solve: sample_every must be >= 1");
  require(f0.all_finite(), "solve: initial data must be finite");
  const long n = step_count(T, tau);
  const auto& grid = f0.grid();

  Trajectory traj;
  traj.kind = kind;
  auto record = [&](long step, const ComplexField& u) {
    traj.steps.push_back(step);
    traj.times.push_back(step * tau);
    if (options.diagnostics) traj.diagnostics.push_back(diagnose(u, params, kind));
    if (options.keep_snapshots) traj.snapshots.push_back(u);
  };

  ComplexField u = f0;
  record(0, u);
  if (n == 0) return traj;

  const LinearStep linear(grid, tau, kind);
  CVector buf(u.values().begin(), u.values().end());
  // consecutive half nonlinear steps fuse into one full step between samples
  rotate(buf, 0.5 * tau, params);
  for (long step = 1; step <= n; ++step) {
    linear.apply(buf);
    const bool sample = step == n || step % options.sample_every == 0;
    rotate(buf, sample ? 0.5 * tau : tau, params);
    if (!finite(buf))
      throw ComputationError("nan_detected",
                             "non-finite values after step " + std::to_string(step));
    if (sample) {
      u = ComplexField(grid, buf);
      record(step, u);
      if (step < n) rotate(buf, 0.5 * tau, params);
    }
  }
  return traj;
}

ComplexField solve_final(const ComplexField& f0, double T, double tau,
                         const NonlinearityParams& params, FlowKind kind) {
  const long n = step_count(T, tau);
  SolveOptions opt;
  opt.sample_every = std::max(1L, n);
  opt.keep_snapshots = true;
  opt.diagnostics = false;
  auto traj = solve(f0, T, tau, params, kind, opt);
  return std::move(traj.snapshots.back());
}

void export_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "manifest.csv");
  require(static_cast<bool>(csv), "export_trajectory: cannot write manifest.csv");
  csv << "step,t,mass,energy,linf_norm\n";
  char line[256];
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Diagnostics d = i < traj.diagnostics.size() ? traj.diagnostics[i] : Diagnostics{};
    std::snprintf(line, sizeof line, "%ld,%.17g,%.17g,%.17g,%.17g\n", traj.steps[i], traj.times[i],
                  d.mass, d.energy, d.linf);
    csv << line;
    if (i < traj.snapshots.size()) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshot_%08ld.ldsp", traj.steps[i]);
      write_snapshot(dir / name, traj.snapshots[i], traj.times[i]);
    }
  }
}

}  // namespace latdisp
