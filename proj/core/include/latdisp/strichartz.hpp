#pragma once
// Admissible exponent pairs, mixed space-time norms of the linear flow and
// the sweep measuring how the Strichartz ratio depends on the mesh size.
#include <cstdint>
#include <string>
#include <vector>

#include "latdisp/continuum_limit.hpp"
#include "latdisp/solvers.hpp"

namespace latdisp {

/// Lebesgue exponent in [1, inf], stored through its exact reciprocal
/// num/den (num = 0 means infinity).
class Exponent {
 public:
  static Exponent infinity() { return Exponent(0, 1); }
  /// The exponent a/b (b > 0, a >= b).
  static Exponent ratio(std::int64_t a, std::int64_t b = 1);
  /// "inf", an integer, "a/b", or a terminating decimal such as "2.5".
  static Exponent parse(const std::string& text);

  bool is_infinite() const { return num_ == 0; }
  double value() const;
  std::int64_t reciprocal_num() const { return num_; }
  std::int64_t reciprocal_den() const { return den_; }
  std::string to_string() const;
  bool operator==(const Exponent& o) const { return num_ == o.num_ && den_ == o.den_; }

 private:
  Exponent(std::int64_t num, std::int64_t den);
  std::int64_t num_;
  std::int64_t den_;
};

struct AdmissiblePair {
  Exponent q = Exponent::infinity();  ///< time exponent
  Exponent r = Exponent::ratio(2);    ///< space exponent
};

/// q, r >= 2 and 1/q = (1/2)(1/2 - 1/r), decided in exact integer arithmetic.
bool is_admissible(const Exponent& q, const Exponent& r);
inline bool is_admissible(const AdmissiblePair& p) { return is_admissible(p.q, p.r); }

/// ||u||_{L^q_t L^r_x} over the sampled interval. Samples must be uniform
/// in time; q = inf takes the max, finite q the composite trapezoid rule on
/// ||u(t)||_r^q followed by the q-th root (at least two samples).
double mixed_norm(const Trajectory& traj, const AdmissiblePair& pair);
double mixed_norm(const std::vector<double>& times, const std::vector<double>& space_norms,
                  const Exponent& q);

struct StrichartzTarget {
  AdmissiblePair pair;
  /// Normalise by ||f||_{H^2} (inhomogeneous continuum multiplier) instead
  /// of ||f||_2; the pair need not be admissible.
  bool sobolev_data = false;
};

struct StrichartzOptions {
  int samples = 512;               ///< uniform time samples on [0, T], endpoints included
  bool doubled_horizon = true;     ///< also evaluate on [0, 2T] to expose truncation
  FlowKind kind = FlowKind::discrete;
  int threads = 1;
};

struct StrichartzReport {
  StrichartzTarget target;
  double T = 0.0;
  std::vector<double> h;
  std::vector<double> ratios;
  std::vector<double> ratios_doubled;  ///< same on [0, 2T]; empty if not requested
  double trend_slope = 0.0;            ///< log-log slope of ratio against 1/h
  double trend_residual = 0.0;
  double max_over_min = 0.0;
};

/// For every h: f_h = discretize(profile), sample the exact linear flow
/// e^{it(-Delta_h)^2} f_h and report mixed_norm / ||f_h|| per target.
/// Throws PreconditionError for a non-admissible pair without sobolev_data.
std::vector<StrichartzReport> strichartz_sweep(const ContinuumFunction& profile,
                                               const std::vector<StrichartzTarget>& targets,
                                               const std::vector<double>& h_list, double T,
                                               const StrichartzOptions& options = {});

}  // namespace latdisp
