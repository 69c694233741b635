#include "latdisp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fft.hpp"
#include "latdisp/error.hpp"

namespace latdisp {

using detail::require;

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

void require_same_grid(const LatticeGrid& a, const LatticeGrid& b, const char* what) {
  require(a == b, std::string(what) + ": grid mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------
// LatticeGrid

LatticeGrid::LatticeGrid(int dim, int points_per_axis, double mesh)
    : dim_(dim), m_(points_per_axis), h_(mesh), size_(1) {
  require(dim >= 1 && dim <= 3, "LatticeGrid: dimension must be 1, 2 or 3");
  require(points_per_axis >= 4 && is_power_of_two(points_per_axis),
          "LatticeGrid: points per axis must be a power of two >= 4, got " +
              std::to_string(points_per_axis));
  require(std::isfinite(mesh) && mesh > 0.0, "LatticeGrid: mesh size h must be positive");
  for (int j = 0; j < dim; ++j) size_ *= static_cast<std::size_t>(m_);
}

double LatticeGrid::frequency(int i) const { return 2.0 * kPi * signed_index(i) / period(); }

double LatticeGrid::cell_volume() const { return std::pow(h_, dim_); }

void LatticeGrid::unravel(std::size_t flat, std::span<int> out) const {
  for (int j = dim_ - 1; j >= 0; --j) {
    out[j] = static_cast<int>(flat % static_cast<std::size_t>(m_));
    flat /= static_cast<std::size_t>(m_);
  }
}

std::size_t LatticeGrid::ravel(std::span<const int> index) const {
  std::size_t flat = 0;
  for (int j = 0; j < dim_; ++j) {
    const int i = ((index[j] % m_) + m_) % m_;
    flat = flat * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i);
  }
  return flat;
}

bool LatticeGrid::operator==(const LatticeGrid& other) const {
  return dim_ == other.dim_ && m_ == other.m_ && h_ == other.h_;
}

// ---------------------------------------------------------------------------
// fields

ComplexField::ComplexField(const LatticeGrid& grid) : grid_(grid), values_(grid.size()) {}

ComplexField::ComplexField(const LatticeGrid& grid, CVector values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), "ComplexField: value count must equal M^d");
  require(all_finite(), "ComplexField: values must be finite");
}

bool ComplexField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

SpectrumField::SpectrumField(const LatticeGrid& grid) : grid_(grid), coeffs_(grid.size()) {}

SpectrumField::SpectrumField(const LatticeGrid& grid, CVector coefficients)
    : grid_(grid), coeffs_(std::move(coefficients)) {
  require(coeffs_.size() == grid_.size(), "SpectrumField: coefficient count must equal M^d");
}

// ---------------------------------------------------------------------------
// transforms

SpectrumField dft(const ComplexField& f) {
  const auto& g = f.grid();
  SpectrumField out(g);
  fft::transform(g.dim(), g.points_per_axis(), -1, f.values().data(),
                 out.coefficients().data());
  const double scale = g.cell_volume();
  for (auto& c : out.coefficients()) c *= scale;
  return out;
}

ComplexField idft(const SpectrumField& spectrum) {
  const auto& g = spectrum.grid();
  ComplexField out(g);
  fft::transform(g.dim(), g.points_per_axis(), +1, spectrum.coefficients().data(),
                 out.values().data());
  // (2 pi)^{-d} (2 pi / L)^d = L^{-d}
  const double scale = 1.0 / std::pow(g.period(), g.dim());
  for (auto& v : out.values()) v *= scale;
  return out;
}

// ---------------------------------------------------------------------------
// symbols and operators

RealSymbol symbol_sigma(const LatticeGrid& grid) {
  const double h = grid.mesh();
  const double c = 4.0 / (h * h);
  return make_symbol(grid, [&](std::span<const double> xi) {
    double acc = 0.0;
    for (double x : xi) {
      const double s = std::sin(0.5 * h * x);
      acc += c * s * s;
    }
    return acc;
  });
}

RealSymbol symbol_xi_squared(const LatticeGrid& grid) {
  return make_symbol(grid, [](std::span<const double> xi) {
    double acc = 0.0;
    for (double x : xi) acc += x * x;
    return acc;
  });
}

ComplexField discrete_laplacian(const ComplexField& f) {
  const auto& g = f.grid();
  const int d = g.dim();
  const double inv_h2 = 1.0 / (g.mesh() * g.mesh());
  ComplexField out(g);
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::vector<int> nb(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < g.size(); ++flat) {
    g.unravel(flat, idx);
    cplx acc = -2.0 * d * f[flat];
    for (int j = 0; j < d; ++j) {
      nb = idx;
      nb[j] = idx[j] + 1;
      acc += f[g.ravel(nb)];
      nb[j] = idx[j] - 1;
      acc += f[g.ravel(nb)];
    }
    out[flat] = acc * inv_h2;
  }
  return out;
}

void multiply_spectrum(SpectrumField& spectrum, const RealSymbol& m) {
  require_same_grid(spectrum.grid(), m.grid, "multiply_spectrum");
  require(m.values.size() == spectrum.size(), "multiply_spectrum: symbol size mismatch");
  auto c = spectrum.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m.values[i];
}

void multiply_spectrum(SpectrumField& spectrum, const ComplexSymbol& m) {
  require_same_grid(spectrum.grid(), m.grid, "multiply_spectrum");
  require(m.values.size() == spectrum.size(), "multiply_spectrum: symbol size mismatch");
  auto c = spectrum.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= m.values[i];
}

ComplexField apply_multiplier(const ComplexField& f, const RealSymbol& m) {
  auto s = dft(f);
  multiply_spectrum(s, m);
  return idft(s);
}

ComplexField apply_multiplier(const ComplexField& f, const ComplexSymbol& m) {
  auto s = dft(f);
  multiply_spectrum(s, m);
  return idft(s);
}

// ---------------------------------------------------------------------------
// norms

double lp_norm(const ComplexField& f, double p) {
  require(p >= 1.0 || std::isinf(p), "lp_norm: exponent p must satisfy p >= 1");
  double peak = 0.0;
  for (cplx z : f.values()) peak = std::max(peak, std::abs(z));
  if (std::isinf(p) || peak == 0.0) return peak;
  const double vol = f.grid().cell_volume();
  double acc = 0.0;
  if (p == 2.0) {
    for (cplx z : f.values()) acc += std::norm(z);
    return std::sqrt(vol * acc);
  }
  for (cplx z : f.values()) acc += std::pow(std::abs(z) / peak, p);
  return peak * std::pow(vol * acc, 1.0 / p);
}

double spectral_l2_norm(const SpectrumField& spectrum) {
  const auto& g = spectrum.grid();
  double acc = 0.0;
  for (cplx c : spectrum.coefficients()) acc += std::norm(c);
  return std::sqrt(acc / std::pow(g.period(), g.dim()));
}

double sobolev_norm(const ComplexField& f, double s, SobolevOptions options) {
  require(std::isfinite(s), "sobolev_norm: order s must be finite");
  const auto& g = f.grid();
  const auto spec = dft(f);
  const auto base = options.discrete_op ? symbol_sigma(g) : symbol_xi_squared(g);
  const double total = spectral_l2_norm(spec);

  double acc = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double b = base.values[i];
    double w;
    if (!options.homogeneous) {
      w = std::pow(1.0 + b, 0.5 * s);
    } else if (i == 0 && s != 0.0) {
      // DC mode: weight 0 for s > 0; for s < 0 only admissible on mean-zero data.
      if (s < 0.0) {
        require(std::abs(spec[i]) <= 1e-12 * std::max(total, 1e-300) * std::pow(g.period(), 0.5 * g.dim()),
                "sobolev_norm: homogeneous norm with s < 0 requires a mean-zero field");
      }
      w = 0.0;
    } else {
      w = std::pow(b, 0.5 * s);
    }
    acc += std::norm(w * spec[i]);
  }
  return std::sqrt(acc / std::pow(g.period(), g.dim()));
}

double gns_theta(double q, double s) {
  require(s > 0.0 && std::isfinite(s), "gns: order s must be positive");
  require(q >= 2.0 || std::isinf(q), "gns: exponent q must be >= 2");
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  const double theta = (1.0 - 2.0 * inv_q) / s;
  require(theta > 0.0 && theta < 1.0,
          "gns: exponents incompatible, need theta in (0,1) with 1/q = 1/2 - theta s/2");
  return theta;
}

double gns_ratio(const ComplexField& f, double q, double s) {
  const double theta = gns_theta(q, s);
  const double lq = lp_norm(f, q);
  const double l2 = lp_norm(f, 2.0);
  require(l2 > 0.0, "gns_ratio: field must be nonzero");
  const double hs = sobolev_norm(f, s, {.homogeneous = true, .discrete_op = false});
  require(hs > 0.0, "gns_ratio: homogeneous Sobolev norm vanishes (constant field)");
  return lq / (std::pow(l2, 1.0 - theta) * std::pow(hs, theta));
}

}  // namespace latdisp
