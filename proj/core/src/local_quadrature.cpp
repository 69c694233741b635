#include "local_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latdisp/error.hpp"
#include "latdisp/lattice.hpp"
#include "latdisp/littlewood_paley.hpp"

namespace latdisp::local {

double Problem::weight(double t1, double t2) const {
  if (unit_weight) return 1.0;
  return eta2(weight_scale * t1, weight_scale * t2);
}

double Problem::phase(double t1, double t2) const {
  const double s1 = std::sin(0.5 * B * t1);
  const double s2 = std::sin(0.5 * B * t2);
  const double S = s1 * s1 + s2 * s2;
  return A * S * S;
}

void Problem::gradient(double t1, double t2, double g[2]) const {
  const double s1 = std::sin(0.5 * B * t1);
  const double s2 = std::sin(0.5 * B * t2);
  const double S = s1 * s1 + s2 * s2;
  g[0] = A * B * S * std::sin(B * t1);
  g[1] = A * B * S * std::sin(B * t2);
}

void Problem::hessian(double t1, double t2, double h[3]) const {
  const double s1 = std::sin(0.5 * B * t1);
  const double s2 = std::sin(0.5 * B * t2);
  const double S = s1 * s1 + s2 * s2;
  const double a1 = std::sin(B * t1), a2 = std::sin(B * t2);
  const double c = A * B * B;
  h[0] = c * (0.5 * a1 * a1 + S * std::cos(B * t1));
  h[1] = c * (0.5 * a2 * a2 + S * std::cos(B * t2));
  h[2] = c * 0.5 * a1 * a2;
}

double Problem::hessian_bound() const {
  const double half = 0.5 * std::min(B * support, kPi);
  const double s = std::sin(half);
  return std::abs(A) * B * B * (1.0 + 2.0 * s * s);
}

double Problem::gradient_max() const {
  constexpr int n = 512;
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t1 = support * i / n;
    for (int j = 0; j <= n; ++j) {
      const double t2 = support * j / n;
      double g[2];
      gradient(t1, t2, g);
      best = std::max({best, std::abs(g[0]), std::abs(g[1])});
    }
  }
  // the scan resolves the maximum to within one cell of the Hessian bound
  return best + hessian_bound() * support / n;
}

namespace {

struct Interval {
  int row;
  int begin;
  int end;
  bool operator<(const Interval& o) const {
    return row != o.row ? row < o.row : begin < o.begin;
  }
};

struct Cell {
  double x0, y0, d;
};

int sample_index(double x, double a, double delta, int ms) {
  const double k = std::ceil((x + a) / delta - 1e-9);
  return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(ms)));
}

}  // namespace

Result evaluate(const Problem& p, const Window& win, const Params& par) {
  detail::require(p.half_period > 0.0 && p.support > 0.0 && p.support <= p.half_period,
                  "local quadrature: invalid domain");
  detail::require(win.half_width >= 0 && win.step > 0.0, "local quadrature: invalid window");
  const double a = p.half_period;
  const double h_global = std::max(p.hessian_bound(), 1e-300);
  const double quantum = kPi / a;
  const double bw = p.unit_weight ? 0.0 : par.kstar / p.transition;
  const double wd = win.half_width * win.step;
  const double c1 = win.center[0], c2 = win.center[1];
  // inner hole where the weight vanishes identically
  const double hole = p.unit_weight ? 0.0 : kPi / p.weight_scale;
  const double b = p.support;

  struct Layout {
    double sigma, R, region;
    int ms;
    double delta;
  };
  auto layout = [&](double H) {
    Layout L;
    const double sqrtH = std::sqrt(H);
    L.sigma = std::max(par.alpha * sqrtH, quantum);
    const double kappa = std::max({par.beta * sqrtH, bw, quantum});
    L.R = wd + kappa + 7.0 * L.sigma;
    L.region = L.R + 7.0 * L.sigma;
    const double spread = std::max(bw, 3.0 * H / L.sigma);
    const double needed = (wd + L.region + spread) * a / kPi;
    detail::require(needed * par.oversample < par.max_per_axis,
                    "local quadrature: samples per axis exceed the cap");
    L.ms = std::max(64, 2 * static_cast<int>(std::ceil(0.5 * par.oversample * needed)));
    L.delta = 2.0 * a / L.ms;
    return L;
  };

  // Cells of a quadtree over theta whose frequency image may reach the
  // region box. Pruning uses the global Hessian bound as Lipschitz constant.
  auto select = [&](const Layout& L, double leaf, std::vector<Cell>& cells) {
    cells.clear();
    std::vector<Cell> stack;
    if (b < a) {
      stack.push_back({-b, -b, 2.0 * b});
    } else {
      stack.push_back({-a, -a, 2.0 * a});
    }
    while (!stack.empty()) {
      const Cell cell = stack.back();
      stack.pop_back();
      const double half = 0.5 * cell.d;
      const double m1 = cell.x0 + half, m2 = cell.y0 + half;
      if (hole > 0.0 && std::max(std::abs(m1), std::abs(m2)) + half <= hole) continue;
      double g[2];
      p.gradient(m1, m2, g);
      const double dist = std::max(std::abs(-g[0] - c1), std::abs(-g[1] - c2));
      const double lip = h_global * half;
      if (dist - lip > L.region) continue;
      if (dist + lip <= L.region || lip <= leaf * L.sigma) {
        cells.push_back(cell);
        continue;
      }
      stack.push_back({cell.x0, cell.y0, half});
      stack.push_back({m1, cell.y0, half});
      stack.push_back({cell.x0, m2, half});
      stack.push_back({m1, m2, half});
    }
  };

  auto regional_hessian = [&](const std::vector<Cell>& cells) {
    double best = 0.0;
    for (const auto& cell : cells)
      for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) {
          const double t1 = cell.x0 + 0.5 * i * cell.d, t2 = cell.y0 + 0.5 * j * cell.d;
          if (p.weight(t1, t2) == 0.0 && !p.unit_weight) continue;
          double h[3];
          p.hessian(t1, t2, h);
          best = std::max({best, std::abs(h[0]) + std::abs(h[2]), std::abs(h[1]) + std::abs(h[2])});
        }
    return best;
  };

  // Shrink the Hessian scale to the region actually sampled; the region
  // only shrinks along the iteration, so each scale bounds its own region.
  std::vector<Cell> cells;
  double H = h_global;
  Layout L = layout(H);
  // coarse leaves while estimating; cells then over-cover the region, which
  // only makes the estimate larger
  select(L, 16.0, cells);
  for (int iter = 0; iter < 8; ++iter) {
    const double h_reg = std::max(1.1 * regional_hessian(cells), 1e-300);
    if (h_reg >= 0.8 * H) break;
    H = h_reg;
    L = layout(H);
    select(L, 16.0, cells);
  }
  select(L, 1.0, cells);
  const double sigma = L.sigma, R = L.R, delta = L.delta;
  const int ms = L.ms;

  std::vector<Interval> intervals;
  for (const auto& cell : cells) {
    const int r0 = sample_index(cell.x0, a, delta, ms);
    const int r1 = sample_index(cell.x0 + cell.d, a, delta, ms);
    const int k0 = sample_index(cell.y0, a, delta, ms);
    const int k1 = sample_index(cell.y0 + cell.d, a, delta, ms);
    if (k1 > k0)
      for (int r = r0; r < r1; ++r) intervals.push_back({r, k0, k1});
  }
  std::sort(intervals.begin(), intervals.end());

  std::size_t total = 0;
  for (const auto& iv : intervals) total += static_cast<std::size_t>(iv.end - iv.begin);
  if (total > par.max_samples)
    throw ComputationError("quadrature_cap_exceeded",
                           "local quadrature: " + std::to_string(total) +
                               " samples exceed the cap");

  const int n = 2 * win.half_width + 1;
  Result out;
  out.values.assign(static_cast<std::size_t>(n) * n, cplx{});
  out.samples_per_axis = ms;
  std::vector<cplx> row(static_cast<std::size_t>(n));
  std::size_t used = 0;
  std::size_t i = 0;
  while (i < intervals.size()) {
    const int r = intervals[i].row;
    const double t1 = -a + r * delta;
    std::fill(row.begin(), row.end(), cplx{});
    bool any = false;
    for (; i < intervals.size() && intervals[i].row == r; ++i) {
      for (int k = intervals[i].begin; k < intervals[i].end; ++k) {
        const double t2 = -a + k * delta;
        const double w = p.weight(t1, t2);
        if (w == 0.0) continue;
        double g[2];
        p.gradient(t1, t2, g);
        const double chi = 0.25 * std::erfc((std::abs(-g[0] - c1) - R) / sigma) *
                           std::erfc((std::abs(-g[1] - c2) - R) / sigma);
        const double amp = w * chi;
        if (amp < 1e-24) continue;
        ++used;
        any = true;
        const cplx v = amp * std::polar(1.0, p.phase(t1, t2));
        cplx e = std::polar(1.0, (c2 - wd) * t2);
        const cplx rot = std::polar(1.0, win.step * t2);
        for (int j = 0; j < n; ++j) {
          row[j] += v * e;
          e *= rot;
        }
      }
    }
    if (!any) continue;
    cplx e = std::polar(1.0, (c1 - wd) * t1);
    const cplx rot = std::polar(1.0, win.step * t1);
    for (int j1 = 0; j1 < n; ++j1) {
      cplx* dst = out.values.data() + static_cast<std::size_t>(j1) * n;
      for (int j2 = 0; j2 < n; ++j2) dst[j2] += e * row[j2];
      e *= rot;
    }
  }
  const double scale = delta * delta;
  for (auto& v : out.values) v *= scale;
  out.samples = used;
  return out;
}

}  // namespace latdisp::local
