#include "latdisp/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latdisp/error.hpp"
#include "latdisp/random.hpp"

namespace latdisp {

using detail::require;

namespace {

double s_fn(double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; }

}  // namespace

double smooth_step(double u) {
  const double a = std::abs(u);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double left = s_fn(2.0 - a);
  const double right = s_fn(a - 1.0);
  return left / (left + right);
}

double phi(std::span<const double> point) {
  double acc = 1.0;
  for (double u : point) {
    acc *= smooth_step(u);
    if (acc == 0.0) break;
  }
  return acc;
}

double eta2(double v1, double v2) {
  const double outer = smooth_step(v1 / (2.0 * kPi)) * smooth_step(v2 / (2.0 * kPi));
  if (outer == 0.0) return 0.0;
  const double inner = smooth_step(v1 / kPi) * smooth_step(v2 / kPi);
  return outer - inner;
}

double eta(std::span<const double> point) {
  double outer = 1.0;
  double inner = 1.0;
  for (double v : point) {
    outer *= smooth_step(v / (2.0 * kPi));
    inner *= smooth_step(v / kPi);
  }
  return outer - inner;
}

DyadicScale::DyadicScale(int k) : k_(k) {
  require(k >= 0 && k < 1000, "DyadicScale: exponent k must be a nonnegative integer");
}

DyadicScale DyadicScale::from_value(double value) {
  require(std::isfinite(value) && value > 0.0 && value <= 1.0,
          "DyadicScale: N must lie in (0, 1]");
  int e = 0;
  const double m = std::frexp(value, &e);
  require(m == 0.5, "DyadicScale: N must be an exact power of two, got " + std::to_string(value));
  return DyadicScale(1 - e);
}

double DyadicScale::value() const { return std::ldexp(1.0, -k_); }

RealSymbol psi(const LatticeGrid& grid, DyadicScale scale) {
  const double c = grid.mesh() / scale.value();
  std::vector<double> v(static_cast<std::size_t>(grid.dim()));
  return make_symbol(grid, [&](std::span<const double> xi) {
    for (std::size_t j = 0; j < xi.size(); ++j) v[j] = c * xi[j];
    return eta(v);
  });
}

ComplexField project(const ComplexField& f, DyadicScale scale) {
  return apply_multiplier(f, psi(f.grid(), scale));
}

std::vector<DyadicScale> covering_scales(const LatticeGrid& grid) {
  const int kmax = static_cast<int>(std::lround(std::log2(grid.points_per_axis())));
  std::vector<DyadicScale> out;
  for (int k = 0; k <= kmax; ++k) out.emplace_back(k);
  return out;
}

ComplexField reconstruct(const ComplexField& f, std::span<const DyadicScale> scales) {
  require(!scales.empty(), "reconstruct: scale list must not be empty");
  const auto& g = f.grid();
  auto spec = dft(f);
  const cplx dc = spec[0];
  spec[0] = 0.0;
  std::vector<double> total(g.size(), 0.0);
  for (const auto& n : scales) {
    const auto m = psi(g, n);
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += m.values[i];
  }
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= total[i];
  spec[0] = dc;
  return idft(spec);
}

double square_function_norm(const ComplexField& f, double p, std::span<const DyadicScale> scales) {
  require(!scales.empty(), "square_function_norm: scale list must not be empty");
  require(p > 1.0 && std::isfinite(p), "square_function_norm: p must lie in (1, inf)");
  const auto& g = f.grid();
  const auto spec = dft(f);
  CVector acc(g.size());
  for (const auto& n : scales) {
    auto band = spec;
    multiply_spectrum(band, psi(g, n));
    const auto pn = idft(band);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += std::norm(pn[i]);
  }
  for (auto& z : acc) z = std::sqrt(z.real());
  return lp_norm(ComplexField(g, std::move(acc)), p);
}

SquareFunctionBracket square_function_bracket(const LatticeGrid& grid, double p, int count,
                                              std::uint64_t seed) {
  require(count >= 1, "square_function_bracket: count must be positive");
  const auto scales = covering_scales(grid);
  SplitMix64 rng(seed);
  SquareFunctionBracket out;
  out.ratios.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const auto f = random_mean_zero_field(grid, rng);
    out.ratios.push_back(square_function_norm(f, p, scales) / lp_norm(f, p));
  }
  out.min_ratio = *std::min_element(out.ratios.begin(), out.ratios.end());
  out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
  return out;
}

}  // namespace latdisp
