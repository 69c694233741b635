#pragma once

// Cell-average discretization f_h, the per-cell affine extension p_h, and
// the lattice-to-continuum convergence experiment.

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "latdisp/lattice.hpp"
#include "latdisp/solvers.hpp"

namespace latdisp {

/// a exp(-|z - c|^2 / w^2), periodized over the torus.
struct Gaussian {
  std::array<double, 2> center{0.0, 0.0};
  double width = 1.0;
  cplx amplitude{1.0, 0.0};
};

/// Finite sum of periodized Gaussians.
struct GaussianSum {
  std::vector<Gaussian> terms;
};

struct Constant {
  cplx value{0.0, 0.0};
};

/// alpha + beta . z, not periodized (only meaningful away from the seam).
struct Affine {
  cplx alpha{0.0, 0.0};
  std::array<cplx, 2> beta{};
};

/// Closed-form data on the square torus [0, period)^2.
struct ContinuumFunction {
  double period = 1.0;
  std::variant<Gaussian, GaussianSum, Constant, Affine> shape;

  /// Throws unless every Gaussian satisfies period >= 12 width and has a
  /// finite center and amplitude.
  void validate() const;
  cplx operator()(double z1, double z2) const;
};

ContinuumFunction make_gaussian(double period, std::array<double, 2> center, double width,
                                cplx amplitude = 1.0);

/// Sum of `count` Gaussians with centers uniform in the middle half of the
/// torus, widths uniform in [min_width, max_width] and complex amplitudes
/// uniform in the unit square, drawn from SplitMix64(seed).
ContinuumFunction make_random_profile(double period, int count, double min_width,
                                      double max_width, std::uint64_t seed);

/// f_h(y) = h^{-2} int_{y + [0,h)^2} f(z) dz at every site y = h n.
ComplexField discretize(const ContinuumFunction& f, const LatticeGrid& grid);

/// Point samples f(h n).
ComplexField sample(const ContinuumFunction& f, const LatticeGrid& grid);

/// p_h g(z) = g(y) + D_h^+ g(y) . (z - y) on the cell y + [0,h)^2 containing z,
/// sampled at the sites of `fine`. Forward differences wrap periodically.
/// Requires equal periods and h / h_fine a power of two >= 2.
ComplexField interpolate_eval(const ComplexField& g, const LatticeGrid& fine);

/// ||a - b||_{L^2} on their common grid.
double l2_distance_fine(const ComplexField& a, const ComplexField& b);

struct ReferenceSpec {
  int points_per_axis = 1024;
  double tau = 2.5e-4;
  /// the reference self-error must stay below this fraction of the smallest lattice error
  double self_error_fraction = 0.1;
};

struct ConvergenceReport {
  std::vector<double> h;
  std::vector<double> errors;
  std::vector<double> order_increments;  ///< log(e_i / e_{i+1}) / log(h_i / h_{i+1}); first entry NaN
  double fitted_order = 0.0;
  double fit_intercept = 0.0;  ///< log prefactor of the least-squares fit
  double prefactor = 0.0;      ///< A_fit = error(h_max) / h_max^{2/3}
  double residual = 0.0;
  bool non_asymptotic = false;  ///< residual > 0.2
  bool monotone = false;
  bool bounded_by_prefactor = false;  ///< error(h) <= A_fit h^{2/3} for every h
  double T = 0.0;
  double tau = 0.0;
  NonlinearityParams params;
  double reference_space_error = 0.0;  ///< ||u_ref(M) - u_ref(M/2)||
  double reference_time_error = 0.0;   ///< ||u_ref(tau) - u_ref(2 tau)||
};

/// For each h: discretize u0 (cell averages), run the discrete flow to T
/// with step tau, apply p_h onto the reference grid and measure the L^2
/// distance to the continuum reference. The reference is the continuum
/// Strang flow from point samples, certified against runs at half the
/// resolution and twice the step; failing that raises ComputationError
/// "reference_unconverged". tau <= 0 selects reference.tau.
ConvergenceReport run_limit_experiment(const ContinuumFunction& u0, const NonlinearityParams& params,
                                       double T, const std::vector<double>& h_list,
                                       const ReferenceSpec& reference = {}, double tau = 0.0,
                                       int threads = 1);

/// Discretization error at T = 0: ||p_h f_h u0 - u0|| on the reference grid.
ConvergenceReport discretization_error_study(const ContinuumFunction& u0,
                                             const std::vector<double>& h_list,
                                             int reference_points = 1024);

}  // namespace latdisp
