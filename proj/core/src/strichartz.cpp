#include "latdisp/strichartz.hpp"

#include <cmath>
#include <numeric>
#include <span>

#include "fft.hpp"
#include "latdisp/error.hpp"
#include "latdisp/fitting.hpp"
#include "latdisp/parallel.hpp"

namespace latdisp {

using detail::require;

Exponent::Exponent(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
  const std::int64_t g = std::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

Exponent Exponent::ratio(std::int64_t a, std::int64_t b) {
  require(b > 0 && a >= b, "Exponent: need a/b >= 1 with b > 0");
  return Exponent(b, a);
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::size_t used_a = 0, used_b = 0;
      const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
      const long long na = std::stoll(a, &used_a), nb = std::stoll(b, &used_b);
      require(used_a == a.size() && used_b == b.size(), "Exponent: malformed '" + text + "'");
      return ratio(na, nb);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const long long n = std::stoll(text, &used);
      require(used == text.size(), "Exponent: malformed '" + text + "'");
      return ratio(n, 1);
    }
    const std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
    require(!frac.empty() && frac.size() <= 12 && frac.find_first_not_of("0123456789") == std::string::npos,
            "Exponent: malformed '" + text + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::size_t used = 0;
    const long long w = whole.empty() ? 0 : std::stoll(whole, &used);
    require(used == whole.size(), "Exponent: malformed '" + text + "'");
    return ratio(w * den + std::stoll(frac), den);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const PreconditionError*>(&e)) throw;
    throw PreconditionError("Exponent: malformed '" + text + "'");
  }
}

double Exponent::value() const {
  return is_infinite() ? kInf : static_cast<double>(den_) / static_cast<double>(num_);
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  if (num_ == 1) return std::to_string(den_);
  return std::to_string(den_) + "/" + std::to_string(num_);
}

bool is_admissible(const Exponent& q, const Exponent& r) {
  // a = 1/q, b = 1/r; q, r >= 2 iff a, b <= 1/2; admissible iff 4a = 1 - 2b
  const std::int64_t an = q.reciprocal_num(), ad = q.reciprocal_den();
  const std::int64_t bn = r.reciprocal_num(), bd = r.reciprocal_den();
  if (2 * an > ad || 2 * bn > bd) return false;
  return 4 * an * bd == ad * bd - 2 * bn * ad;
}

double mixed_norm(const std::vector<double>& times, const std::vector<double>& space_norms,
                  const Exponent& q) {
  require(!times.empty() && times.size() == space_norms.size(),
          "mixed_norm: need one space norm per sample and at least one sample");
  if (q.is_infinite()) {
    double m = 0.0;
    for (double v : space_norms) m = std::max(m, v);
    return m;
  }
  require(times.size() >= 2, "mixed_norm: finite q needs at least two samples");
  const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  require(dt > 0.0, "mixed_norm: times must increase");
  for (std::size_t i = 1; i < times.size(); ++i)
    require(std::abs(times[i] - times[i - 1] - dt) <= 1e-9 * dt, "mixed_norm: samples must be uniform in time");
  const double qv = q.value();
  double peak = 0.0;
  for (double v : space_norms) peak = std::max(peak, v);
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < space_norms.size(); ++i) {
    const double w = (i == 0 || i + 1 == space_norms.size()) ? 0.5 : 1.0;
    acc += w * std::pow(space_norms[i] / peak, qv);
  }
  return peak * std::pow(acc * dt, 1.0 / qv);
}

double mixed_norm(const Trajectory& traj, const AdmissiblePair& pair) {
  require(!traj.snapshots.empty(), "mixed_norm: trajectory has no snapshots");
  require(traj.snapshots.size() == traj.times.size(), "mixed_norm: snapshots and times disagree");
  std::vector<double> norms;
  for (const auto& s : traj.snapshots) norms.push_back(lp_norm(s, pair.r.value()));
  return mixed_norm(traj.times, norms, pair.q);
}

namespace {

double span_lp(std::span<const cplx> v, double p, double vol) {
  double peak2 = 0.0;
  for (cplx z : v) peak2 = std::max(peak2, std::norm(z));
  if (std::isinf(p) || peak2 == 0.0) return std::sqrt(peak2);
  double acc = 0.0;
  if (p == 2.0) {
    for (cplx z : v) acc += std::norm(z);
    return std::sqrt(vol * acc);
  }
  if (p == 4.0) {
    for (cplx z : v) {
      const double a = std::norm(z) / peak2;
      acc += a * a;
    }
  } else {
    for (cplx z : v) acc += std::pow(std::norm(z) / peak2, 0.5 * p);
  }
  return std::sqrt(peak2) * std::pow(vol * acc, 1.0 / p);
}

LatticeGrid sweep_grid(double period, double h) {
  const double m = period / h;
  const long mi = std::lround(m);
  require(std::abs(m - mi) <= 1e-9 * m && mi >= 4 && (mi & (mi - 1)) == 0,
          "strichartz_sweep: every h must split the period into a power-of-two number of cells");
  return LatticeGrid(2, static_cast<int>(mi), period / static_cast<double>(mi));
}

}  // namespace

std::vector<StrichartzReport> strichartz_sweep(const ContinuumFunction& profile,
                                               const std::vector<StrichartzTarget>& targets,
                                               const std::vector<double>& h_list, double T,
                                               const StrichartzOptions& options) {
  profile.validate();
  require(!targets.empty(), "strichartz_sweep: no targets");
  for (const auto& t : targets)
    require(t.sobolev_data || is_admissible(t.pair),
            "strichartz_sweep: pair (" + t.pair.q.to_string() + ", " + t.pair.r.to_string() +
                ") is not admissible");
  require(!h_list.empty(), "strichartz_sweep: h list must not be empty");
  for (std::size_t i = 1; i < h_list.size(); ++i)
    require(h_list[i] < h_list[i - 1], "strichartz_sweep: h list must be strictly decreasing");
  require(std::isfinite(T) && T > 0.0, "strichartz_sweep: T must be positive");
  require(options.samples >= 2, "strichartz_sweep: need at least two time samples");

  std::vector<LatticeGrid> grids;
  for (double h : h_list) grids.push_back(sweep_grid(profile.period, h));

  const std::size_t nt = targets.size(), nh = h_list.size();
  std::vector<std::vector<double>> ratio(nt, std::vector<double>(nh)),
      ratio2(nt, std::vector<double>(nh));
  const long n = options.samples - 1;
  const long total = options.doubled_horizon ? 2 * n : n;
  const double dt = T / static_cast<double>(n);

  parallel_for(nh, options.threads, [&](std::size_t k) {
    const auto& grid = grids[k];
    const auto f = discretize(profile, grid);
    const double l2 = lp_norm(f, 2.0);
    const double h2 = sobolev_norm(f, 2.0);
    require(l2 > 0.0, "strichartz_sweep: data vanish on the grid");
    const auto sym = options.kind == FlowKind::discrete ? symbol_sigma(grid) : symbol_xi_squared(grid);
    // u(t) = M^{-d} * backward(exp(i t q) * forward(f))
    CVector raw(f.values().begin(), f.values().end());
    fft::transform(grid.dim(), grid.points_per_axis(), -1, raw.data(), raw.data());
    const double inv = 1.0 / static_cast<double>(grid.size());
    std::vector<double> quart(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) quart[i] = sym.values[i] * sym.values[i];
    std::vector<double> times(static_cast<std::size_t>(total) + 1);
    std::vector<std::vector<double>> space(nt, std::vector<double>(times.size()));
    CVector buf(grid.size());
    const double vol = grid.cell_volume();
    for (long s = 0; s <= total; ++s) {
      const double t = dt * static_cast<double>(s);
      times[s] = t;
      for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = raw[i] * std::polar(inv, t * quart[i]);
      fft::transform(grid.dim(), grid.points_per_axis(), +1, buf.data(), buf.data());
      for (std::size_t j = 0; j < nt; ++j) {
        std::size_t prev = j;
        for (std::size_t i = 0; i < j; ++i)
          if (targets[i].pair.r == targets[j].pair.r) prev = i;
        space[j][s] = prev != j ? space[prev][s] : span_lp(buf, targets[j].pair.r.value(), vol);
      }
    }
    const std::vector<double> first(times.begin(), times.begin() + n + 1);
    for (std::size_t j = 0; j < nt; ++j) {
      const double denom = targets[j].sobolev_data ? h2 : l2;
      const std::vector<double> part(space[j].begin(), space[j].begin() + n + 1);
      ratio[j][k] = mixed_norm(first, part, targets[j].pair.q) / denom;
      if (options.doubled_horizon) ratio2[j][k] = mixed_norm(times, space[j], targets[j].pair.q) / denom;
    }
  });

  std::vector<StrichartzReport> out;
  for (std::size_t j = 0; j < nt; ++j) {
    StrichartzReport rep;
    rep.target = targets[j];
    rep.T = T;
    rep.h = h_list;
    rep.ratios = ratio[j];
    if (options.doubled_horizon) rep.ratios_doubled = ratio2[j];
    double lo = rep.ratios.front(), hi = lo;
    for (double r : rep.ratios) {
      require(std::isfinite(r) && r > 0.0, "strichartz_sweep: non-positive ratio");
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    rep.max_over_min = hi / lo;
    if (nh >= 3) {
      std::vector<std::pair<double, double>> pairs;
      for (std::size_t k = 0; k < nh; ++k) pairs.emplace_back(1.0 / h_list[k], rep.ratios[k]);
      const auto fit = fit_loglog_slope(pairs);
      rep.trend_slope = fit.slope;
      rep.trend_residual = fit.residual;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace latdisp
