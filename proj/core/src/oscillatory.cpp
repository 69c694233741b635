#include "latdisp/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latdisp/error.hpp"
#include "latdisp/parallel.hpp"
#include "local_quadrature.hpp"

namespace latdisp {

namespace {

constexpr double kStar = 320.0;
constexpr int kWindow = 24;

local::Problem k_problem(DyadicScale N, double s) {
  local::Problem p;
  p.A = 16.0 * s;
  p.B = 1.0;
  p.half_period = kPi;
  p.support = std::min(kPi, 4.0 * kPi * N.value());
  p.weight_scale = 1.0 / N.value();
  p.transition = kPi * N.value();
  return p;
}

local::Problem g_problem(double t) {
  local::Problem p;
  p.A = 16.0 * t;
  p.B = 1.0;
  p.half_period = kPi;
  p.support = kPi;
  p.unit_weight = true;
  return p;
}

local::Problem i_problem(DyadicScale N, double t) {
  local::Problem p;
  p.A = t;
  p.B = N.value();
  p.half_period = 4.0 * kPi;
  p.support = 4.0 * kPi;
  p.weight_scale = 1.0;
  p.transition = kPi;
  return p;
}

constexpr double kGPrefactor = 1.0 / (4.0 * kPi * kPi);

// -- transform route ---------------------------------------------------------

ComplexField fft_kernel(const local::Problem& p, int M, double prefactor) {
  const LatticeGrid grid(2, M, 1.0);
  SpectrumField spec(grid);
  std::vector<double> theta(static_cast<std::size_t>(M));
  for (int i = 0; i < M; ++i) theta[i] = grid.frequency(i);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < M; ++j) {
      const double w = p.weight(theta[i], theta[j]);
      if (w == 0.0) continue;
      spec[static_cast<std::size_t>(i) * M + j] = w * std::polar(1.0, p.phase(theta[i], theta[j]));
    }
  }
  auto out = idft(spec);
  // idft carries (2 pi)^{-2} (2 pi / M)^2; the kernels want (2 pi / M)^2 times prefactor
  const double scale = prefactor * 4.0 * kPi * kPi;
  if (scale != 1.0)
    for (auto& v : out.values()) v *= scale;
  return out;
}

double max_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (cplx z : v) m = std::max(m, std::abs(z));
  return m;
}

double relative(double diff, double ref) { return ref > 0.0 ? diff / ref : diff; }

// max |fine(y) - coarse(y)| over the sites of the coarse grid
double compare_grids(const ComplexField& coarse, const ComplexField& fine) {
  const int mc = coarse.grid().points_per_axis();
  const int mf = fine.grid().points_per_axis();
  double diff = 0.0;
  for (int i = 0; i < mc; ++i) {
    const int fi = (coarse.grid().signed_index(i) + mf) % mf;
    for (int j = 0; j < mc; ++j) {
      const int fj = (coarse.grid().signed_index(j) + mf) % mf;
      diff = std::max(diff, std::abs(coarse[static_cast<std::size_t>(i) * mc + j] -
                                     fine[static_cast<std::size_t>(fi) * mf + fj]));
    }
  }
  return diff;
}

double annulus_max(const ComplexField& f) {
  const auto& g = f.grid();
  const int m = g.points_per_axis();
  const int edge = static_cast<int>(std::ceil(0.4 * m));
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    const int a = std::abs(g.signed_index(i));
    for (int j = 0; j < m; ++j) {
      if (std::max(a, std::abs(g.signed_index(j))) < edge) continue;
      best = std::max(best, std::abs(f[static_cast<std::size_t>(i) * m + j]));
    }
  }
  return best;
}

int next_pow2(double x) {
  int m = 1;
  while (m < x) m *= 2;
  return m;
}

int fft_start_size(const local::Problem& p, const QuadratureSpec& spec) {
  const double bw = p.unit_weight ? 0.0 : kStar / p.transition;
  return std::max({spec.initial_M, 64, next_pow2(2.0 * (p.gradient_max() + bw))});
}

void check_spec(const QuadratureSpec& spec) {
  detail::require(spec.initial_M >= 64, "QuadratureSpec: M_q must be at least 64");
  detail::require(spec.tol > 0.0, "QuadratureSpec: tol must be positive");
  detail::require(spec.max_M >= spec.initial_M, "QuadratureSpec: max_M must be >= M_q");
}

KernelField certified_fft(const local::Problem& p, double prefactor, const QuadratureSpec& spec) {
  check_spec(spec);
  int M = fft_start_size(p, spec);
  if (2 * M > spec.max_M)
    throw ComputationError("quadrature_cap_exceeded",
                           "transform route needs " + std::to_string(2 * M) +
                               " samples per axis, cap is " + std::to_string(spec.max_M));
  ComplexField coarse = fft_kernel(p, M, prefactor);
  double disc = 0.0;
  while (2 * M <= spec.max_M) {
    ComplexField fine = fft_kernel(p, 2 * M, prefactor);
    const double peak = max_abs(fine.values());
    disc = relative(compare_grids(coarse, fine), peak);
    const bool quiet_edge = annulus_max(fine) <= 1e-3 * peak;
    if (disc <= spec.tol && quiet_edge) return {std::move(fine), 2 * M, disc};
    M *= 2;
    coarse = std::move(fine);
  }
  throw ComputationError("quadrature_cap_exceeded",
                         "grid doubling did not converge below max_M = " +
                             std::to_string(spec.max_M) + "; last relative discrepancy " +
                             std::to_string(disc));
}

KernelSup sup_of_field(const KernelField& k) {
  KernelSup out;
  const auto& g = k.values.grid();
  const int m = g.points_per_axis();
  for (std::size_t i = 0; i < k.values.size(); ++i) {
    const double a = std::abs(k.values[i]);
    if (a > out.sup_abs) {
      out.sup_abs = a;
      out.argmax = {static_cast<double>(g.signed_index(static_cast<int>(i / m))),
                    static_cast<double>(g.signed_index(static_cast<int>(i % m)))};
    }
  }
  out.Mq_used = k.Mq;
  out.discrepancy = k.discrepancy;
  return out;
}

// -- windowed route ----------------------------------------------------------

local::Result run_window(const local::Problem& p, const local::Window& w, double widen) {
  local::Params par;
  par.alpha *= widen;
  par.beta *= widen;
  par.kstar = kStar * widen;
  return local::evaluate(p, w, par);
}

KernelWindow certified_window(const local::Problem& p, double prefactor,
                              std::array<double, 2> center, int half_width, double step,
                              double tol) {
  detail::require(tol > 0.0, "kernel window: tol must be positive");
  const local::Window w{center, half_width, step};
  double widen = 1.0;
  local::Result prev = run_window(p, w, widen);
  double disc = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    widen *= 1.5;
    local::Result next = run_window(p, w, widen);
    double diff = 0.0;
    for (std::size_t i = 0; i < next.values.size(); ++i)
      diff = std::max(diff, std::abs(next.values[i] - prev.values[i]));
    disc = relative(diff, max_abs(next.values));
    prev = std::move(next);
    if (disc <= tol) break;
  }
  if (disc > tol)
    throw ComputationError("quadrature_cap_exceeded",
                           "windowed quadrature did not settle; relative discrepancy " +
                               std::to_string(disc));
  KernelWindow out;
  out.center = center;
  out.half_width = half_width;
  out.step = step;
  out.values = std::move(prev.values);
  for (auto& v : out.values) v *= prefactor;
  out.Mq = prev.samples_per_axis;
  out.discrepancy = disc;
  return out;
}

// Magnitude proxy for the contribution of a neighbourhood of theta: the
// weight times the product of the effective stationary widths along the two
// Hessian eigendirections, where a vanishing eigenvalue is replaced by the
// cubic (fold) or quartic (cusp) width.
double amplitude_proxy(const local::Problem& p, double t1, double t2) {
  const double w = p.weight(t1, t2);
  if (w == 0.0) return 0.0;
  double h[3];
  p.hessian(t1, t2, h);
  const double tr = 0.5 * (h[0] + h[1]);
  const double rad = std::hypot(0.5 * (h[0] - h[1]), h[2]);
  const double lam[2] = {tr + rad, tr - rad};
  const double eps = 1e-3 * p.support;
  const double cap = 2.0 * p.support;
  double prod = w;
  for (int k = 0; k < 2; ++k) {
    // eigenvector for lam[k]
    double e1 = h[2], e2 = lam[k] - h[0];
    if (std::hypot(e1, e2) < 1e-300 * (1.0 + std::abs(lam[k]))) {
      e1 = (k == 0) == (h[0] >= h[1]) ? 1.0 : 0.0;
      e2 = 1.0 - e1;
    }
    const double nrm = std::hypot(e1, e2);
    e1 /= nrm;
    e2 /= nrm;
    auto q = [&](double e) {
      double hh[3];
      p.hessian(t1 + e * e1, t2 + e * e2, hh);
      return hh[0] * e1 * e1 + hh[1] * e2 * e2 + 2.0 * hh[2] * e1 * e2;
    };
    const double qp = q(eps), q0 = q(0.0), qm = q(-eps);
    const double d3 = std::abs(qp - qm) / (2.0 * eps);
    const double d4 = std::abs(qp - 2.0 * q0 + qm) / (eps * eps);
    double len = cap;
    if (lam[k] != 0.0) len = std::min(len, std::sqrt(2.0 * kPi / std::abs(lam[k])));
    if (d3 > 0.0) len = std::min(len, 4.24 * std::cbrt(1.0 / d3));
    if (d4 > 0.0) len = std::min(len, 5.5 * std::pow(d4, -0.25));
    prod *= len;
  }
  return prod;
}

std::array<double, 2> fundamental(std::array<double, 2> y, double step) {
  double a = std::abs(y[0]), b = std::abs(y[1]);
  if (b > a) std::swap(a, b);
  return {std::round(a / step) * step, std::round(b / step) * step};
}

struct Peak {
  double proxy;
  double t1, t2;
};

std::vector<std::array<double, 2>> candidate_sites(const local::Problem& p, double step,
                                                   int max_count) {
  constexpr int n = 192;
  const double b = p.support;
  const double cell = b / n;
  std::vector<double> P(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      P[static_cast<std::size_t>(i) * n + j] = amplitude_proxy(p, (i + 0.5) * cell, (j + 0.5) * cell);
  std::vector<Peak> peaks;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = P[static_cast<std::size_t>(i) * n + j];
      if (v <= 0.0) continue;
      bool is_max = true;
      for (int di = -1; di <= 1 && is_max; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, c = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || c < 0 || a >= n || c >= n) continue;
          // mirror cells across the diagonal agree only up to rounding
          if (P[static_cast<std::size_t>(a) * n + c] > v * (1.0 + 1e-9)) {
            is_max = false;
            break;
          }
        }
      if (is_max) peaks.push_back({v, (i + 0.5) * cell, (j + 0.5) * cell});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) {
    return x.proxy != y.proxy ? x.proxy > y.proxy : (x.t1 != y.t1 ? x.t1 < y.t1 : x.t2 < y.t2);
  });

  const double H = p.hessian_bound();
  std::vector<std::array<double, 2>> out{{0.0, 0.0}};
  const double floor = peaks.empty() ? 0.0 : 1e-3 * peaks.front().proxy;
  for (const auto& pk : peaks) {
    if (static_cast<int>(out.size()) > max_count || pk.proxy < floor) break;
    // refine the peak location until its image is pinned to within a window
    double t1 = pk.t1, t2 = pk.t2, h = cell, best = pk.proxy;
    for (int level = 0; level < 8 && H * h > kWindow * step; ++level) {
      const double sub = h / 8.0;
      double b1 = t1, b2 = t2;
      for (int a = -8; a <= 8; ++a)
        for (int c = -8; c <= 8; ++c) {
          const double u1 = t1 + a * sub, u2 = t2 + c * sub;
          const double v = amplitude_proxy(p, u1, u2);
          if (v > best) {
            best = v;
            b1 = u1;
            b2 = u2;
          }
        }
      t1 = b1;
      t2 = b2;
      h = sub;
    }
    double g[2];
    p.gradient(t1, t2, g);
    const auto y = fundamental({-g[0], -g[1]}, step);
    bool dup = false;
    for (const auto& o : out)
      dup = dup || std::max(std::abs(o[0] - y[0]), std::abs(o[1] - y[1])) <= kWindow * step;
    if (!dup) out.push_back(y);
  }
  return out;
}

struct ClimbResult {
  double value = 0.0;
  std::array<double, 2> site{};
  std::array<double, 2> center{};
};

ClimbResult climb(const local::Problem& p, std::array<double, 2> center, int half_width,
                  double step) {
  ClimbResult best;
  best.center = center;
  const int n = 2 * half_width + 1;
  for (int iter = 0; iter < 60; ++iter) {
    const auto r = run_window(p, {center, half_width, step}, 1.0);
    std::size_t arg = 0;
    double val = -1.0;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const double a = std::abs(r.values[i]);
      if (a > val) {
        val = a;
        arg = i;
      }
    }
    const int j1 = static_cast<int>(arg) / n, j2 = static_cast<int>(arg) % n;
    const std::array<double, 2> site{center[0] + (j1 - half_width) * step,
                                     center[1] + (j2 - half_width) * step};
    if (val > best.value) best = {val, site, center};
    const int margin = std::max(2, half_width / 4);
    const bool interior = j1 >= margin && j1 < n - margin && j2 >= margin && j2 < n - margin;
    if (interior || val < best.value) break;
    center = site;
  }
  return best;
}

KernelSup local_sup(const local::Problem& p, double prefactor, double step, bool refine,
                    double tol) {
  const auto sites = candidate_sites(p, step, 10);
  std::vector<ClimbResult> climbs;
  // coarse-to-fine: the coarse levels walk across caustic patterns that are
  // much wider than one window, the unit level settles on a lattice maximum
  for (const auto& c : sites) {
    ClimbResult best{0.0, c, c};
    for (double level : {16.0, 4.0, 1.0}) {
      const auto r = climb(p, best.site, kWindow, level * step);
      if (r.value >= best.value) best = r;
    }
    climbs.push_back(best);
  }
  double top = 0.0;
  for (const auto& c : climbs) top = std::max(top, c.value);

  KernelSup out;
  out.local_route = true;
  for (const auto& c : climbs) {
    // anything within a whisker of the top is certified, so ties cannot hide
    if (c.value < (1.0 - 1e-3) * top) continue;
    std::array<double, 2> center = c.site;
    double fine_step = step;
    if (refine) {
      fine_step = step / 8.0;
      center = climb(p, c.site, 12, fine_step).site;
    }
    const auto win = certified_window(p, prefactor, center, 2, fine_step, tol);
    for (std::size_t i = 0; i < win.values.size(); ++i) {
      const double a = std::abs(win.values[i]);
      if (a > out.sup_abs) {
        out.sup_abs = a;
        out.argmax = {center[0] + (static_cast<int>(i) / 5 - 2) * fine_step,
                      center[1] + (static_cast<int>(i) % 5 - 2) * fine_step};
      }
    }
    out.Mq_used = std::max(out.Mq_used, win.Mq);
    out.discrepancy = std::max(out.discrepancy, win.discrepancy);
  }
  return out;
}

KernelSup hybrid_sup(const local::Problem& p, double prefactor, const QuadratureSpec& spec) {
  check_spec(spec);
  if (2 * fft_start_size(p, spec) <= spec.max_M) {
    try {
      return sup_of_field(certified_fft(p, prefactor, spec));
    } catch (const ComputationError& e) {
      if (e.code() != "quadrature_cap_exceeded") throw;
    }
  }
  return local_sup(p, prefactor, 1.0, false, spec.tol);
}

}  // namespace

// ---------------------------------------------------------------------------

ComplexField eval_G_unit(double t, int M) {
  detail::require(std::isfinite(t), "eval_G_unit: t must be finite");
  return fft_kernel(g_problem(t), M, kGPrefactor);
}

KernelField eval_G_unit(double t, const QuadratureSpec& spec) {
  detail::require(std::isfinite(t), "eval_G_unit: t must be finite");
  return certified_fft(g_problem(t), kGPrefactor, spec);
}

ComplexField eval_K_unit(DyadicScale N, double s, int M) {
  detail::require(std::isfinite(s), "eval_K_unit: s must be finite");
  return fft_kernel(k_problem(N, s), M, 1.0);
}

KernelField eval_K_unit(DyadicScale N, double s, const QuadratureSpec& spec) {
  detail::require(std::isfinite(s), "eval_K_unit: s must be finite");
  return certified_fft(k_problem(N, s), 1.0, spec);
}

std::vector<cplx> eval_I(DyadicScale N, double t, std::span<const std::array<double, 2>> points,
                         double tol) {
  detail::require(std::isfinite(t), "eval_I: t must be finite");
  const auto p = i_problem(N, t);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(certified_window(p, 1.0, x, 0, 1.0, tol).values[0]);
  return out;
}

KernelWindow eval_K_window(DyadicScale N, double s, std::array<double, 2> center, int half_width,
                           double step, double tol) {
  detail::require(std::isfinite(s), "eval_K_window: s must be finite");
  return certified_window(k_problem(N, s), 1.0, center, half_width, step, tol);
}

KernelWindow eval_G_window(double t, std::array<double, 2> center, int half_width, double step,
                           double tol) {
  detail::require(std::isfinite(t), "eval_G_window: t must be finite");
  return certified_window(g_problem(t), kGPrefactor, center, half_width, step, tol);
}

KernelSup sup_K(DyadicScale N, double s, const QuadratureSpec& spec) {
  return hybrid_sup(k_problem(N, s), 1.0, spec);
}

KernelSup sup_K_local(DyadicScale N, double s, double tol) {
  return local_sup(k_problem(N, s), 1.0, 1.0, false, tol);
}

KernelSup sup_G(double t, const QuadratureSpec& spec) {
  return hybrid_sup(g_problem(t), kGPrefactor, spec);
}

KernelSup sup_G_local(double t, double tol) {
  return local_sup(g_problem(t), kGPrefactor, 1.0, false, tol);
}

KernelSup sup_I(DyadicScale N, double t, double tol) {
  return local_sup(i_problem(N, t), 1.0, N.value(), true, tol);
}

double decay_s_max(DyadicScale N) {
  const double n = N.value();
  return 2000.0 / (16.0 * n * n * n);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  detail::require(lo > 0.0 && hi >= lo, "log_spaced: need 0 < lo <= hi");
  detail::require(count >= 1, "log_spaced: count must be positive");
  if (count == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

DecayPlan default_decay_plan(DyadicScale N, double points_per_decade) {
  detail::require(points_per_decade > 0.0, "default_decay_plan: density must be positive");
  const double hi = decay_s_max(N);
  const int count = std::max(3, static_cast<int>(std::ceil(points_per_decade * std::log10(hi / 10.0))) + 1);
  return {N, log_spaced(10.0, hi, count)};
}

std::vector<DecayRecord> decay_sweep(std::span<const DecayPlan> plans, const QuadratureSpec& spec,
                                     int threads) {
  check_spec(spec);
  std::vector<DecayRecord> out;
  for (const auto& plan : plans) {
    for (double s : plan.times) {
      detail::require(std::isfinite(s) && s > 0.0, "decay_sweep: times must be positive");
      detail::require(s <= decay_s_max(plan.N) * (1.0 + 1e-12),
                      "decay_sweep: s exceeds the budget 16 s N^3 <= 2000");
      out.push_back({plan.N, s, 0.0, 0.0, 0});
    }
  }
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto r = sup_K(out[i].N, out[i].s, spec);
    out[i].sup_abs = r.sup_abs;
    out[i].normalized = std::sqrt(out[i].s) * r.sup_abs;
    out[i].Mq_used = r.Mq_used;
  });
  return out;
}

std::vector<DecayRecord> decay_sweep_I(std::span<const DecayPlan> plans, double tol, int threads) {
  std::vector<DecayRecord> out;
  for (const auto& plan : plans)
    for (double t : plan.times) {
      detail::require(std::isfinite(t) && t > 0.0, "decay_sweep_I: times must be positive");
      out.push_back({plan.N, t, 0.0, 0.0, 0});
    }
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto r = sup_I(out[i].N, out[i].s, tol);
    const double n = out[i].N.value();
    out[i].sup_abs = r.sup_abs;
    out[i].normalized = n * n * n * n * out[i].s * r.sup_abs;
    out[i].Mq_used = r.Mq_used;
  });
  return out;
}

}  // namespace latdisp
