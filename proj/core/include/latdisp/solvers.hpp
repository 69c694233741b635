#pragma once

// Exact linear propagators and the Strang splitting solver for
//   i u_t + Delta_h^2 u = lambda |u|^{p-1} u   (discrete kind)
//   i u_t + Delta^2 u   = lambda |u|^{p-1} u   (continuum kind, spectral on the torus)
// Written as u_t = i A^2 u - i lambda |u|^{p-1} u with A = -Delta_h or -Delta,
// the linear flow multiplies frequencies by exp(i t sigma^2) (resp. exp(i t |xi|^4))
// and the nonlinear substep rotates phases by exp(-i lambda |u|^{p-1} tau).

#include <filesystem>
#include <string>
#include <vector>

#include "latdisp/lattice.hpp"

namespace latdisp {

enum class FlowKind { discrete, continuum };

std::string to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& name);

struct NonlinearityParams {
  double lambda = 0.0;
  double p = 3.0;

  /// Violations of p > 1 and of the window 1 < p < 5 for lambda < 0; empty if valid.
  std::vector<std::string> violations() const;
  /// Throws PreconditionError listing every violation.
  void validate() const;
};

/// exp(i t sigma^2) or exp(i t |xi|^4) applied as a multiplier.
ComplexField linear_propagate(const ComplexField& f, double t, FlowKind kind);

/// Exact solution of i u_t = lambda |u|^{p-1} u over tau: u exp(-i lambda |u|^{p-1} tau).
ComplexField nonlinear_phase_step(const ComplexField& f, double tau, const NonlinearityParams& params);

/// ||f||_2^2.
double mass(const ComplexField& f);

/// 1/2 ||A f||_2^2 - lambda / (p+1) ||f||_{p+1}^{p+1}, the functional the
/// flow conserves, with A = Delta_h (symbol sigma) for the discrete kind and
/// A = Delta (symbol |xi|^2) for the continuum kind. The potential sign
/// follows from i u_t + A^2 u = lambda |u|^{p-1} u.
double energy(const ComplexField& f, const NonlinearityParams& params, FlowKind kind);

struct Diagnostics {
  double mass = 0.0;
  double energy = 0.0;
  double linf = 0.0;
};

struct Trajectory {
  FlowKind kind = FlowKind::discrete;
  std::vector<long> steps;
  std::vector<double> times;
  std::vector<ComplexField> snapshots;  ///< empty unless requested
  std::vector<Diagnostics> diagnostics;
};

struct SolveOptions {
  long sample_every = 1;
  bool keep_snapshots = true;
  bool diagnostics = true;
};

/// min(1e-3, h^4 / 4).
double default_time_step(const LatticeGrid& grid);

/// Strang splitting N(tau/2) L(tau) N(tau/2), sampled every sample_every
/// steps plus t = 0 and t = T. T / tau must be a nonnegative integer (tau
/// may be negative together with T to run backwards). Throws
/// ComputationError "nan_detected" naming the step at which the state
/// stopped being finite.
Trajectory solve(const ComplexField& f0, double T, double tau, const NonlinearityParams& params,
                 FlowKind kind, const SolveOptions& options = {});

/// Final state only, without storing intermediate samples.
ComplexField solve_final(const ComplexField& f0, double T, double tau,
                         const NonlinearityParams& params, FlowKind kind);

/// Writes snapshot_<step>.ldsp per stored snapshot and manifest.csv with
/// columns step,t,mass,energy,linf_norm.
void export_trajectory(const Trajectory& traj, const std::filesystem::path& dir);

}  // namespace latdisp
