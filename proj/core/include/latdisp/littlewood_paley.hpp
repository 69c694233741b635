#pragma once

// Smooth dyadic frequency cutoffs and the Littlewood-Paley band filters P_N.

#include <cstdint>
#include <span>
#include <vector>

#include "latdisp/lattice.hpp"

namespace latdisp {

/// C-infinity step: 1 on |u| <= 1, 0 on |u| >= 2,
/// s(2-|u|) / (s(2-|u|) + s(|u|-1)) in between, with s(v) = exp(-1/v) for v > 0.
double smooth_step(double u);

/// Tensor-product bump phi(xi) = prod_j smooth_step(xi_j): exactly 1 on
/// [-1,1]^d and exactly 0 outside [-2,2]^d.
double phi(std::span<const double> point);

/// Annular cutoff eta(v) = phi(v / 2pi) - phi(v / pi), supported in
/// [-4pi,4pi]^d minus (-pi,pi)^d. psi_N(xi) = eta(h xi / N).
double eta(std::span<const double> point);
double eta2(double v1, double v2);

/// Dyadic number N = 2^{-k}, k >= 0.
class DyadicScale {
 public:
  explicit DyadicScale(int k);
  /// Throws PreconditionError unless value == 2^{-k} exactly for some k >= 0.
  static DyadicScale from_value(double value);

  int exponent() const { return k_; }
  double value() const;

  bool operator==(const DyadicScale&) const = default;

 private:
  int k_;
};

/// psi_N(xi_k) = phi(h xi / 2 pi N) - phi(h xi / pi N) on the grid frequencies.
RealSymbol psi(const LatticeGrid& grid, DyadicScale scale);

/// P_N f, the multiplier psi_N applied to f.
ComplexField project(const ComplexField& f, DyadicScale scale);

/// Scales N = 1, 1/2, ..., 2^{-K} with K = ceil(log2 M): the smallest
/// nonzero |h xi|_inf on the torus is 2 pi / M, and the telescoping sum
/// of psi_N equals 1 there once 2^K * (2/M) >= 2.
std::vector<DyadicScale> covering_scales(const LatticeGrid& grid);

/// sum_N P_N f with the mean (k = 0 mode, where every psi_N vanishes)
/// removed before and restored after.
ComplexField reconstruct(const ComplexField& f, std::span<const DyadicScale> scales);

/// || (sum_N |P_N f|^2)^{1/2} ||_{L^p(hZ^d)}.
double square_function_norm(const ComplexField& f, double p, std::span<const DyadicScale> scales);

struct SquareFunctionBracket {
  double min_ratio = 0.0;  ///< empirical c_p
  double max_ratio = 0.0;  ///< empirical C_p
  std::vector<double> ratios;
};

/// ||S f||_p / ||f||_p over `count` random mean-zero fields drawn from `seed`.
SquareFunctionBracket square_function_bracket(const LatticeGrid& grid, double p, int count,
                                              std::uint64_t seed);

}  // namespace latdisp
