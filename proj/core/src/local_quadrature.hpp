#pragma once

// Windowed evaluation of 2-d oscillatory integrals
//
//   F(y) = int_{[-a,a)^2} w(theta) exp(i y.theta + i Phi(theta)) dtheta,
//   Phi(theta) = A * S(B theta)^2,  S(u) = sin^2(u_1/2) + sin^2(u_2/2),
//
// for y in a small box. Only samples whose local frequency -grad Phi lies
// near the box contribute; they are selected with a smooth cutoff in
// frequency and enumerated by a quadtree over theta.

#include <array>
#include <cstddef>
#include <vector>

#include "latdisp/aligned.hpp"

namespace latdisp::local {

struct Problem {
  double A = 0.0;
  double B = 1.0;
  double half_period = 0.0;  ///< samples cover [-a, a)^2 periodically
  double support = 0.0;      ///< w vanishes outside [-b, b]^2, b <= a
  double weight_scale = 1.0; ///< w(theta) = eta(weight_scale * theta)
  bool unit_weight = false;  ///< w == 1 instead
  double transition = 0.0;   ///< narrowest transition width of w in theta (0 if unit_weight)

  double weight(double t1, double t2) const;
  double phase(double t1, double t2) const;
  void gradient(double t1, double t2, double g[2]) const;
  void hessian(double t1, double t2, double h[3]) const;  // h11, h22, h12
  /// Upper bound on the infinity-operator norm of the Hessian over the support.
  double hessian_bound() const;
  /// Largest |d Phi / d theta_j| over the support, by scanning.
  double gradient_max() const;
};

struct Params {
  double alpha = 1.0;   ///< cutoff width sigma = alpha sqrt(H)
  double beta = 4.0;    ///< frequency margin kappa >= beta sqrt(H)
  double kstar = 320.0; ///< weight bandwidth in units of 1 / transition
  double oversample = 1.15;
  std::size_t max_samples = 400'000'000;
  int max_per_axis = 1 << 26;
};

struct Window {
  std::array<double, 2> center{0.0, 0.0};
  int half_width = 0;
  double step = 1.0;
};

struct Result {
  std::vector<cplx> values;  ///< (2W+1)^2, first index y1, second y2
  int samples_per_axis = 0;
  std::size_t samples = 0;
};

Result evaluate(const Problem& problem, const Window& window, const Params& params = {});

}  // namespace latdisp::local
