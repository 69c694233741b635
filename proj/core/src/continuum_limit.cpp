#include "latdisp/continuum_limit.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "latdisp/error.hpp"
#include "latdisp/fitting.hpp"
#include "latdisp/parallel.hpp"
#include "latdisp/random.hpp"

namespace latdisp {

using detail::require;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_power_of_two(long m) { return m > 0 && (m & (m - 1)) == 0; }

// erf(b) - erf(a) without cancellation in the tails
double erf_diff(double a, double b) {
  if (a >= 0.0) return std::erfc(a) - std::erfc(b);
  if (b <= 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

// sum over the three nearest images of exp(-(x - c - mL)^2 / w^2)
double gauss_point(double x, double c, double w, double L) {
  double acc = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const double d = (x - c - m * L) / w;
    acc += std::exp(-d * d);
  }
  return acc;
}

// (1/h) int_y^{y+h} of the periodized 1-d profile
double gauss_cell(double y, double h, double c, double w, double L) {
  double acc = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const double s = c + m * L;
    acc += erf_diff((y - s) / w, (y + h - s) / w);
  }
  return acc * w * std::sqrt(kPi) / (2.0 * h);
}

void check_gaussian(const Gaussian& g, double period) {
  require(std::isfinite(g.width) && g.width > 0.0, "Gaussian: width must be positive");
  require(period >= 12.0 * g.width,
          "Gaussian: period must be at least 12 widths so the periodization tail is negligible");
  require(std::isfinite(g.center[0]) && std::isfinite(g.center[1]),
          "Gaussian: center must be finite");
  require(std::isfinite(g.amplitude.real()) && std::isfinite(g.amplitude.imag()),
          "Gaussian: amplitude must be finite");
}

double wrap(double c, double L) {
  const double r = std::fmod(c, L);
  return r < 0.0 ? r + L : r;
}

void add_gaussian(const Gaussian& g, const LatticeGrid& grid, bool cells, CVector& out) {
  const int m = grid.points_per_axis();
  const double h = grid.mesh(), L = grid.period();
  std::vector<double> a(static_cast<std::size_t>(m)), b(static_cast<std::size_t>(m));
  const double c1 = wrap(g.center[0], L), c2 = wrap(g.center[1], L);
  for (int i = 0; i < m; ++i) {
    a[i] = cells ? gauss_cell(i * h, h, c1, g.width, L) : gauss_point(i * h, c1, g.width, L);
    b[i] = cells ? gauss_cell(i * h, h, c2, g.width, L) : gauss_point(i * h, c2, g.width, L);
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i) * m + j] += g.amplitude * (a[i] * b[j]);
}

ComplexField build(const ContinuumFunction& f, const LatticeGrid& grid, bool cells) {
  f.validate();
  require(grid.dim() == 2, "discretize: continuum profiles are two-dimensional");
  require(std::abs(grid.period() - f.period) <= 1e-12 * f.period,
          "discretize: grid period must equal the profile period");
  CVector out(grid.size());
  const int m = grid.points_per_axis();
  const double h = grid.mesh();
  std::visit(Overloaded{
                 [&](const Gaussian& g) { add_gaussian(g, grid, cells, out); },
                 [&](const GaussianSum& s) {
                   for (const auto& g : s.terms) add_gaussian(g, grid, cells, out);
                 },
                 [&](const Constant& c) {
                   for (auto& v : out) v = c.value;
                 },
                 [&](const Affine& a) {
                   const double shift = cells ? 0.5 * h : 0.0;
                   for (int i = 0; i < m; ++i)
                     for (int j = 0; j < m; ++j)
                       out[static_cast<std::size_t>(i) * m + j] =
                           a.alpha + a.beta[0] * (i * h + shift) + a.beta[1] * (j * h + shift);
                 }},
             f.shape);
  return ComplexField(grid, std::move(out));
}

long refinement_ratio(const LatticeGrid& coarse, const LatticeGrid& fine) {
  require(coarse.dim() == fine.dim(), "interpolate_eval: dimension mismatch");
  require(std::abs(coarse.period() - fine.period()) <= 1e-12 * coarse.period(),
          "interpolate_eval: grids must share the period");
  const double ratio = coarse.mesh() / fine.mesh();
  const long r = std::lround(ratio);
  require(std::abs(ratio - r) <= 1e-9 * ratio && r >= 2 && is_power_of_two(r),
          "interpolate_eval: h / h_fine must be a power of two >= 2");
  require(static_cast<long>(fine.points_per_axis()) == r * coarse.points_per_axis(),
          "interpolate_eval: grid sizes inconsistent with the refinement ratio");
  return r;
}

LatticeGrid grid_for(double period, double h) {
  const double m = period / h;
  const long mi = std::lround(m);
  require(std::abs(m - mi) <= 1e-9 * m && is_power_of_two(mi) && mi >= 4,
          "h must divide the period into a power-of-two number of cells >= 4");
  return LatticeGrid(2, static_cast<int>(mi), period / static_cast<double>(mi));
}

ComplexField subsample(const ComplexField& f, const LatticeGrid& coarse) {
  const int mf = f.grid().points_per_axis(), mc = coarse.points_per_axis();
  const int r = mf / mc;
  CVector out(coarse.size());
  for (int i = 0; i < mc; ++i)
    for (int j = 0; j < mc; ++j)
      out[static_cast<std::size_t>(i) * mc + j] = f[static_cast<std::size_t>(i * r) * mf + j * r];
  return ComplexField(coarse, std::move(out));
}

void finish_report(ConvergenceReport& rep) {
  const std::size_t n = rep.h.size();
  rep.order_increments.assign(n, std::numeric_limits<double>::quiet_NaN());
  rep.monotone = true;
  for (std::size_t i = 1; i < n; ++i) {
    rep.order_increments[i] =
        std::log(rep.errors[i - 1] / rep.errors[i]) / std::log(rep.h[i - 1] / rep.h[i]);
    rep.monotone = rep.monotone && rep.errors[i] < rep.errors[i - 1];
  }
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.emplace_back(rep.h[i], rep.errors[i]);
  if (n >= 3) {
    const auto fit = fit_loglog_slope(pairs);
    rep.fitted_order = fit.slope;
    rep.fit_intercept = fit.intercept;
    rep.residual = fit.residual;
  }
  rep.non_asymptotic = rep.residual > 0.2;
  rep.prefactor = rep.errors.front() / std::pow(rep.h.front(), 2.0 / 3.0);
  rep.bounded_by_prefactor = true;
  for (std::size_t i = 0; i < n; ++i)
    rep.bounded_by_prefactor = rep.bounded_by_prefactor &&
                               rep.errors[i] <= rep.prefactor * std::pow(rep.h[i], 2.0 / 3.0) * (1.0 + 1e-12);
}

void check_h_list(const std::vector<double>& h_list) {
  require(!h_list.empty(), "h list must not be empty");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    require(h_list[i] < h_list[i - 1], "h list must be strictly decreasing");
}

}  // namespace

void ContinuumFunction::validate() const {
  require(std::isfinite(period) && period > 0.0, "ContinuumFunction: period must be positive");
  std::visit(Overloaded{[&](const Gaussian& g) { check_gaussian(g, period); },
                        [&](const GaussianSum& s) {
                          require(!s.terms.empty(), "GaussianSum: needs at least one term");
                          for (const auto& g : s.terms) check_gaussian(g, period);
                        },
                        [](const Constant&) {}, [](const Affine&) {}},
             shape);
}

cplx ContinuumFunction::operator()(double z1, double z2) const {
  auto gauss = [&](const Gaussian& g) {
    const double c1 = wrap(g.center[0], period), c2 = wrap(g.center[1], period);
    return g.amplitude * (gauss_point(z1, c1, g.width, period) * gauss_point(z2, c2, g.width, period));
  };
  return std::visit(Overloaded{[&](const Gaussian& g) { return gauss(g); },
                               [&](const GaussianSum& s) {
                                 cplx acc = 0.0;
                                 for (const auto& g : s.terms) acc += gauss(g);
                                 return acc;
                               },
                               [](const Constant& c) { return c.value; },
                               [&](const Affine& a) {
                                 return a.alpha + a.beta[0] * z1 + a.beta[1] * z2;
                               }},
                    shape);
}

ContinuumFunction make_gaussian(double period, std::array<double, 2> center, double width,
                                cplx amplitude) {
  ContinuumFunction f{period, Gaussian{center, width, amplitude}};
  f.validate();
  return f;
}

ContinuumFunction make_random_profile(double period, int count, double min_width,
                                      double max_width, std::uint64_t seed) {
  require(count >= 1, "make_random_profile: count must be positive");
  require(min_width > 0.0 && max_width >= min_width, "make_random_profile: invalid width range");
  SplitMix64 rng(seed);
  GaussianSum sum;
  for (int i = 0; i < count; ++i) {
    Gaussian g;
    g.center = {rng.uniform(0.25 * period, 0.75 * period), rng.uniform(0.25 * period, 0.75 * period)};
    g.width = rng.uniform(min_width, max_width);
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    g.amplitude = {re, im};
    sum.terms.push_back(g);
  }
  ContinuumFunction f{period, std::move(sum)};
  f.validate();
  return f;
}

ComplexField discretize(const ContinuumFunction& f, const LatticeGrid& grid) {
  return build(f, grid, true);
}

ComplexField sample(const ContinuumFunction& f, const LatticeGrid& grid) {
  return build(f, grid, false);
}

ComplexField interpolate_eval(const ComplexField& g, const LatticeGrid& fine) {
  const auto& coarse = g.grid();
  const long r = refinement_ratio(coarse, fine);
  const int d = coarse.dim();
  CVector out(fine.size());
  std::vector<int> fi(static_cast<std::size_t>(d)), ci(static_cast<std::size_t>(d)),
      nb(static_cast<std::size_t>(d));
  for (std::size_t flat = 0; flat < fine.size(); ++flat) {
    fine.unravel(flat, fi);
    for (int j = 0; j < d; ++j) ci[j] = static_cast<int>(fi[j] / r);
    const cplx base = g[coarse.ravel(ci)];
    cplx v = base;
    for (int j = 0; j < d; ++j) {
      const long off = fi[j] % r;
      if (off == 0) continue;
      nb = ci;
      nb[j] = (nb[j] + 1) % coarse.points_per_axis();
      v += (g[coarse.ravel(nb)] - base) * (static_cast<double>(off) / static_cast<double>(r));
    }
    out[flat] = v;
  }
  return ComplexField(fine, std::move(out));
}

double l2_distance_fine(const ComplexField& a, const ComplexField& b) {
  require(a.grid() == b.grid(), "l2_distance_fine: grid mismatch");
  CVector diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return lp_norm(ComplexField(a.grid(), std::move(diff)), 2.0);
}

ConvergenceReport run_limit_experiment(const ContinuumFunction& u0, const NonlinearityParams& params,
                                       double T, const std::vector<double>& h_list,
                                       const ReferenceSpec& reference, double tau, int threads) {
  params.validate();
  u0.validate();
  check_h_list(h_list);
  require(std::isfinite(T) && T >= 0.0, "run_limit_experiment: T must be finite and >= 0");
  require(reference.points_per_axis >= 8 && is_power_of_two(reference.points_per_axis),
          "run_limit_experiment: reference points per axis must be a power of two");
  require(reference.tau > 0.0, "run_limit_experiment: reference tau must be positive");
  const double L = u0.period;
  const LatticeGrid ref_grid(2, reference.points_per_axis, L / reference.points_per_axis);
  const LatticeGrid half_grid(2, reference.points_per_axis / 2, 2.0 * L / reference.points_per_axis);
  require(ref_grid.mesh() <= h_list.back() / 4.0 * (1.0 + 1e-12),
          "run_limit_experiment: reference grid must be at least 4x finer than the smallest h");
  const double step = tau > 0.0 ? tau : reference.tau;
  std::vector<LatticeGrid> grids;
  for (double h : h_list) grids.push_back(grid_for(L, h));

  ConvergenceReport rep;
  rep.h = h_list;
  rep.T = T;
  rep.tau = step;
  rep.params = params;
  rep.errors.assign(h_list.size(), 0.0);

  ComplexField u_ref(ref_grid), u_half(half_grid), u_coarse_t(ref_grid);
  const std::size_t n_ref = 3;
  parallel_for(n_ref, threads, [&](std::size_t i) {
    if (i == 0) {
      u_ref = solve_final(sample(u0, ref_grid), T, reference.tau, params, FlowKind::continuum);
    } else if (i == 1) {
      u_half = solve_final(sample(u0, half_grid), T, reference.tau, params, FlowKind::continuum);
    } else if (i == 2) {
      u_coarse_t = solve_final(sample(u0, ref_grid), T, 2.0 * reference.tau, params, FlowKind::continuum);
    }
  });
  rep.reference_space_error = l2_distance_fine(subsample(u_ref, half_grid), u_half);
  rep.reference_time_error = l2_distance_fine(u_ref, u_coarse_t);

  parallel_for(h_list.size(), threads, [&](std::size_t k) {
    const auto fh = discretize(u0, grids[k]);
    const auto uh = solve_final(fh, T, step, params, FlowKind::discrete);
    rep.errors[k] = l2_distance_fine(interpolate_eval(uh, ref_grid), u_ref);
  });

  double smallest = rep.errors.front();
  for (double e : rep.errors) smallest = std::min(smallest, e);
  const double self = std::max(rep.reference_space_error, rep.reference_time_error);
  if (self > reference.self_error_fraction * smallest)
    throw ComputationError("reference_unconverged",
                           "reference self-error " + std::to_string(self) + " exceeds " +
                               std::to_string(reference.self_error_fraction) +
                               " x the smallest lattice error " + std::to_string(smallest));
  finish_report(rep);
  return rep;
}

ConvergenceReport discretization_error_study(const ContinuumFunction& u0,
                                             const std::vector<double>& h_list,
                                             int reference_points) {
  u0.validate();
  check_h_list(h_list);
  require(reference_points >= 8 && is_power_of_two(reference_points),
          "discretization_error_study: reference points must be a power of two");
  const LatticeGrid ref_grid(2, reference_points, u0.period / reference_points);
  const auto exact = sample(u0, ref_grid);
  ConvergenceReport rep;
  rep.h = h_list;
  for (double h : h_list) {
    const auto fh = discretize(u0, grid_for(u0.period, h));
    rep.errors.push_back(l2_distance_fine(interpolate_eval(fh, ref_grid), exact));
  }
  finish_report(rep);
  return rep;
}

}  // namespace latdisp
