#pragma once

// The fundamental solution G, the frequency-localized kernels K_{N,1} and
// the rescaled integrals I_N, and decay sweeps over (N, s).
//
// All kernels are evaluated at unit mesh; K_{N,h}(hy, t) = h^{-2} K_{N,1}(y, t/h^4),
// so the rescaled time s = t / h^4 is the only time parameter.

#include <array>
#include <span>
#include <vector>

#include "latdisp/lattice.hpp"
#include "latdisp/littlewood_paley.hpp"

namespace latdisp {

struct QuadratureSpec {
  int initial_M = 64;  ///< first samples per axis for the transform route
  double tol = 1e-8;   ///< relative self-consistency tolerance on the sup
  int max_M = 4096;    ///< transform size cap
};

/// Kernel values on the unit lattice, site n holding y = signed_index(n).
struct KernelField {
  ComplexField values;
  int Mq = 0;                ///< samples per axis of the finer of the two compared grids
  double discrepancy = 0.0;  ///< max |finer - coarser| / max |finer|
};

/// G(y,t) = (2 pi)^{-2} int_{[-pi,pi]^2} exp(i y.xi + i t sigma(xi)^2) dxi from
/// M samples per axis, for y in [-M/2, M/2)^2. No self-consistency check.
ComplexField eval_G_unit(double t, int M);
/// Same, doubling M until two successive grids agree to spec.tol and the
/// outer annulus is negligible. Throws ComputationError
/// "quadrature_cap_exceeded" past spec.max_M.
KernelField eval_G_unit(double t, const QuadratureSpec& spec);

/// K_{N,1}(y,s) = int_{[-pi,pi]^2} exp(i y.theta + 16 i s S(theta)^2) eta(theta/N) dtheta,
/// S(theta) = sin^2(theta_1/2) + sin^2(theta_2/2).
ComplexField eval_K_unit(DyadicScale N, double s, int M);
KernelField eval_K_unit(DyadicScale N, double s, const QuadratureSpec& spec);

/// I_N(x,t) = int_{R^2} exp(i x.xi + i t S(N xi)^2) eta(xi) dxi at arbitrary points.
std::vector<cplx> eval_I(DyadicScale N, double t, std::span<const std::array<double, 2>> points,
                         double tol = 1e-8);

/// Values on the box center + step * [-W, W]^2, row-major with y_1 outermost.
struct KernelWindow {
  std::array<double, 2> center{0.0, 0.0};
  int half_width = 0;
  double step = 1.0;
  std::vector<cplx> values;
  int Mq = 0;
  double discrepancy = 0.0;
};

/// Windowed evaluation that never touches sites outside the box; its cost
/// does not grow with s. Certified by re-running with widened cutoffs.
KernelWindow eval_K_window(DyadicScale N, double s, std::array<double, 2> center, int half_width,
                           double step = 1.0, double tol = 1e-8);
KernelWindow eval_G_window(double t, std::array<double, 2> center, int half_width,
                           double step = 1.0, double tol = 1e-8);

struct KernelSup {
  double sup_abs = 0.0;
  std::array<double, 2> argmax{0.0, 0.0};
  int Mq_used = 0;
  bool local_route = false;
  double discrepancy = 0.0;
};

/// sup over lattice sites of |K_{N,1}(., s)|. Uses the transform route when
/// it fits in spec.max_M and the windowed route otherwise.
KernelSup sup_K(DyadicScale N, double s, const QuadratureSpec& spec);
/// Windowed route only: candidate sites from the stationary-phase geometry,
/// each followed by hill climbing on the lattice.
KernelSup sup_K_local(DyadicScale N, double s, double tol = 1e-8);
KernelSup sup_G(double t, const QuadratureSpec& spec);
KernelSup sup_G_local(double t, double tol = 1e-8);
/// sup over x in R^2 of |I_N(x,t)|: lattice search at spacing N, then
/// refinement to spacing N/8 around the maximum.
KernelSup sup_I(DyadicScale N, double t, double tol = 1e-8);

struct DecayRecord {
  DyadicScale N{0};
  double s = 0.0;  ///< rescaled time for K, t for I
  double sup_abs = 0.0;
  double normalized = 0.0;  ///< s^{1/2} sup for K, N^4 t sup for I
  int Mq_used = 0;
};

struct DecayPlan {
  DyadicScale N{0};
  std::vector<double> times;
};

/// Largest rescaled time allowed for scale N: 16 s N^3 <= 2000.
double decay_s_max(DyadicScale N);
/// `count` log-spaced times in [lo, hi], endpoints included.
std::vector<double> log_spaced(double lo, double hi, int count);
/// s log-spaced in [10, decay_s_max(N)] with the given density per decade.
DecayPlan default_decay_plan(DyadicScale N, double points_per_decade = 4.0);

std::vector<DecayRecord> decay_sweep(std::span<const DecayPlan> plans, const QuadratureSpec& spec,
                                     int threads = 1);
/// Same, times t for I_N with normalized = N^4 t sup_x |I_N(x,t)|.
std::vector<DecayRecord> decay_sweep_I(std::span<const DecayPlan> plans, double tol = 1e-8,
                                       int threads = 1);

}  // namespace latdisp
