#pragma once

// Lattice grids, complex fields, the lattice Fourier transform and the
// multiplier/norm calculus on the periodic torus (hZ/MhZ)^d.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "latdisp/aligned.hpp"

namespace latdisp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Periodic computational torus with M points per axis and mesh size h.
/// Sites are x = h*n with n in [0, M)^d, stored row-major (last axis fastest).
/// Frequencies use the symmetric range k in [-M/2, M/2), stored in FFT
/// order (index i represents k = i for i < M/2 and k = i - M otherwise).
class LatticeGrid {
 public:
  LatticeGrid(int dim, int points_per_axis, double mesh);

  int dim() const { return dim_; }
  int points_per_axis() const { return m_; }
  double mesh() const { return h_; }
  double period() const { return m_ * h_; }
  std::size_t size() const { return size_; }

  /// Signed frequency/site index for an FFT-ordered axis index.
  int signed_index(int i) const { return i < m_ / 2 ? i : i - m_; }
  /// xi_k = 2*pi*k/L for an FFT-ordered axis index.
  double frequency(int i) const;
  /// h^d, the lattice volume element.
  double cell_volume() const;

  /// Per-axis indices of a flat row-major offset.
  void unravel(std::size_t flat, std::span<int> out) const;
  std::size_t ravel(std::span<const int> index) const;

  bool operator==(const LatticeGrid& other) const;
  bool operator!=(const LatticeGrid& other) const { return !(*this == other); }

 private:
  int dim_;
  int m_;
  double h_;
  std::size_t size_;
};

/// Complex samples u(hn) on a lattice grid.
class ComplexField {
 public:
  explicit ComplexField(const LatticeGrid& grid);  // zero field
  ComplexField(const LatticeGrid& grid, CVector values);

  const LatticeGrid& grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  std::span<cplx> values() { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool all_finite() const;

 private:
  LatticeGrid grid_;
  CVector values_;
};

/// Lattice Fourier coefficients F(f)(xi_k), FFT-ordered.
class SpectrumField {
 public:
  explicit SpectrumField(const LatticeGrid& grid);
  SpectrumField(const LatticeGrid& grid, CVector coefficients);

  const LatticeGrid& grid() const { return grid_; }
  std::span<const cplx> coefficients() const { return coeffs_; }
  std::span<cplx> coefficients() { return coeffs_; }
  cplx operator[](std::size_t i) const { return coeffs_[i]; }
  cplx& operator[](std::size_t i) { return coeffs_[i]; }
  std::size_t size() const { return coeffs_.size(); }

 private:
  LatticeGrid grid_;
  CVector coeffs_;
};

/// Values of a Fourier multiplier m(xi_k) on the grid's frequencies.
template <class T>
struct Symbol {
  LatticeGrid grid;
  std::vector<T> values;
};
using RealSymbol = Symbol<double>;
using ComplexSymbol = Symbol<cplx>;

/// Build a real symbol by evaluating fn(xi) on every frequency point.
template <class Fn>
RealSymbol make_symbol(const LatticeGrid& grid, Fn&& fn);

// -- transforms ------------------------------------------------------------

/// F(f)(xi_k) = h^d sum_n f(hn) exp(-i h n . xi_k).
SpectrumField dft(const ComplexField& f);
/// f(hn) = (2 pi)^{-d} sum_k F(xi_k) exp(i h n . xi_k) (2 pi / L)^d.
ComplexField idft(const SpectrumField& spectrum);

// -- symbols and operators ---------------------------------------------------

/// sigma(xi) = sum_j (4/h^2) sin^2(h xi_j / 2), the symbol of -Delta_h.
RealSymbol symbol_sigma(const LatticeGrid& grid);
/// |xi|^2, the symbol of the continuum -Delta on the same frequencies.
RealSymbol symbol_xi_squared(const LatticeGrid& grid);

/// Periodic five-point (2d+1 in general) stencil Delta_h.
ComplexField discrete_laplacian(const ComplexField& f);

ComplexField apply_multiplier(const ComplexField& f, const RealSymbol& m);
ComplexField apply_multiplier(const ComplexField& f, const ComplexSymbol& m);
/// In-place variant on a spectrum (no transforms).
void multiply_spectrum(SpectrumField& spectrum, const RealSymbol& m);
void multiply_spectrum(SpectrumField& spectrum, const ComplexSymbol& m);

// -- norms -------------------------------------------------------------------

/// ||f||_{L^p(hZ^d)} = (h^d sum |f|^p)^{1/p}; p = kInf gives the max modulus.
double lp_norm(const ComplexField& f, double p);
/// L^2 norm computed on the frequency side: (L^{-d} sum |F|^2)^{1/2}.
double spectral_l2_norm(const SpectrumField& spectrum);

struct SobolevOptions {
  bool homogeneous = false;  ///< |xi|^s (or sigma^{s/2}) instead of <xi>^s
  bool discrete_op = false;  ///< use sigma in place of |xi|^2
};

/// Multiplier-weighted L^2 norm:
///   continuum:   (1+|xi|^2)^{s/2}  or |xi|^s
///   discrete_op: (1+sigma)^{s/2}   or sigma^{s/2}
/// Homogeneous weights give the k = 0 mode weight 0 for s > 0.
double sobolev_norm(const ComplexField& f, double s, SobolevOptions options = {});

/// Interpolation exponent theta with 1/q = 1/2 - theta s / 2, validated to lie in (0,1).
double gns_theta(double q, double s);

/// ||f||_q / (||f||_2^{1-theta} ||f||_{Hdot^s}^theta) with the continuum Hdot^s.
double gns_ratio(const ComplexField& f, double q, double s);

// -- implementation of templates ---------------------------------------------

template <class Fn>
RealSymbol make_symbol(const LatticeGrid& grid, Fn&& fn) {
  RealSymbol out{grid, std::vector<double>(grid.size())};
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  std::vector<double> xi(static_cast<std::size_t>(grid.dim()));
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    grid.unravel(flat, idx);
    for (int j = 0; j < grid.dim(); ++j) xi[j] = grid.frequency(idx[j]);
    out.values[flat] = fn(std::span<const double>(xi));
  }
  return out;
}

}  // namespace latdisp
