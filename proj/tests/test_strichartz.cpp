#include <doctest.h>

#include "latdisp/error.hpp"
#include "latdisp/random.hpp"
#include "latdisp/strichartz.hpp"

using namespace latdisp;

namespace {

AdmissiblePair pair(const char* q, const char* r) { return {Exponent::parse(q), Exponent::parse(r)}; }

Trajectory constant_trajectory(int samples, double value) {
  const LatticeGrid g(2, 8, 0.5);  // area 16
  Trajectory t;
  for (int i = 0; i < samples; ++i) {
    t.times.push_back(0.5 * i);
    t.steps.push_back(i);
    t.snapshots.emplace_back(g, CVector(g.size(), value / 4.0));
  }
  return t;
}

}  // namespace

TEST_CASE("exponents") {
  CHECK(Exponent::parse("inf").is_infinite());
  CHECK(Exponent::parse("8").value() == 8.0);
  CHECK(Exponent::parse("5/2").value() == 2.5);
  CHECK(Exponent::parse("2.5") == Exponent::parse("5/2"));
  CHECK(Exponent::parse("10/4").to_string() == "5/2");
  CHECK_THROWS_AS(Exponent::parse("0.5"), PreconditionError);
  CHECK_THROWS_AS(Exponent::parse("abc"), PreconditionError);
  CHECK_THROWS_AS(Exponent::parse("4x"), PreconditionError);
}

TEST_CASE("admissibility is exact") {
  CHECK(is_admissible(pair("inf", "2")));
  CHECK(is_admissible(pair("8", "4")));
  CHECK(is_admissible(pair("4", "inf")));
  CHECK(is_admissible(pair("12", "3")));
  CHECK_FALSE(is_admissible(pair("4", "4")));
  CHECK_FALSE(is_admissible(pair("2", "inf")));
  CHECK_FALSE(is_admissible(pair("inf", "inf")));
  // 1/q = 1/4 - 1/(2r) holds for q = 4r/(r-2); r = 1 is excluded by r >= 2
  CHECK_FALSE(is_admissible(Exponent::ratio(4, 3), Exponent::ratio(1)));
}

TEST_CASE("mixed norms of sampled trajectories") {
  const auto t = constant_trajectory(5, 3.0);  // ||u||_2 = 3 at every sample
  CHECK(mixed_norm(t, pair("inf", "2")) == doctest::Approx(3.0).epsilon(1e-15));
  // (int_0^2 3^q dt)^{1/q}
  CHECK(mixed_norm(t, pair("8", "4")) ==
        doctest::Approx(3.0 / std::pow(16.0, 0.5 - 0.25) * std::pow(2.0, 1.0 / 8)).epsilon(1e-13));
  CHECK_THROWS_AS(mixed_norm(constant_trajectory(1, 3.0), pair("8", "4")), PreconditionError);
  CHECK(mixed_norm(constant_trajectory(1, 3.0), pair("inf", "2")) == doctest::Approx(3.0));
  CHECK_THROWS_AS(mixed_norm(Trajectory{}, pair("inf", "2")), PreconditionError);
  auto uneven = constant_trajectory(3, 1.0);
  uneven.times[2] = 3.0;
  CHECK_THROWS_AS(mixed_norm(uneven, pair("8", "4")), PreconditionError);
}

TEST_CASE("mixed norm grows with the horizon") {
  const LatticeGrid g(2, 32, 1.0);
  const auto f = discretize(make_gaussian(32.0, {16, 16}, 2.0), g);
  const auto traj = solve(f, 4.0, 0.25, {0.0, 3.0}, FlowKind::discrete);
  Trajectory half = traj;
  half.times.resize(9);
  half.steps.resize(9);
  half.snapshots.erase(half.snapshots.begin() + 9, half.snapshots.end());
  for (const char* q : {"8", "4"}) {
    const AdmissiblePair p{Exponent::parse(q), Exponent::parse(q[0] == '8' ? "4" : "inf")};
    CHECK(mixed_norm(half, p) <= mixed_norm(traj, p));
  }
}

TEST_CASE("sweep basics") {
  const auto prof = make_gaussian(32.0, {16, 16}, 2.0);
  const std::vector<double> hs = {1.0, 0.5, 0.25};
  const std::vector<StrichartzTarget> targets = {
      {pair("inf", "2"), false}, {pair("8", "4"), false}, {pair("4", "inf"), false}, {pair("inf", "inf"), true}};
  StrichartzOptions opt;
  opt.samples = 128;
  opt.doubled_horizon = false;
  const auto reps = strichartz_sweep(prof, targets, hs, 10.0, opt);
  REQUIRE(reps.size() == 4);
  for (double r : reps[0].ratios) CHECK(std::abs(r - 1.0) <= 1e-12);
  for (const auto& rep : reps) {
    CHECK(rep.max_over_min <= 4.0);
    CHECK(rep.trend_slope <= 0.1);
  }

  // both sides are homogeneous of degree one
  const auto scaled = strichartz_sweep(make_gaussian(32.0, {16, 16}, 2.0, cplx(-3.0, 4.0)), targets, hs, 10.0, opt);
  for (std::size_t j = 0; j < reps.size(); ++j)
    for (std::size_t i = 0; i < hs.size(); ++i)
      CHECK(std::abs(scaled[j].ratios[i] - reps[j].ratios[i]) <= 1e-12 * reps[j].ratios[i]);

  // doubling the time sampling rate moves the norm by less than 1%
  opt.samples = 255;
  const auto fine = strichartz_sweep(prof, targets, hs, 10.0, opt);
  for (std::size_t j = 0; j < reps.size(); ++j)
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(std::abs(fine[j].ratios[i] / reps[j].ratios[i] - 1.0) < 0.01);
}

TEST_CASE("sweep rejects non-admissible pairs") {
  const auto prof = make_gaussian(32.0, {16, 16}, 2.0);
  CHECK_THROWS_AS(strichartz_sweep(prof, {{pair("4", "4"), false}}, {1.0, 0.5}, 1.0), PreconditionError);
  CHECK_NOTHROW(strichartz_sweep(prof, {{pair("inf", "inf"), true}}, {1.0, 0.5}, 1.0, {.samples = 8}));
  CHECK_THROWS_AS(strichartz_sweep(prof, {{pair("8", "4"), false}}, {1.0, 0.3}, 1.0), PreconditionError);
}

TEST_CASE("doubled horizon is reported") {
  const auto prof = make_gaussian(32.0, {16, 16}, 2.0);
  const auto reps = strichartz_sweep(prof, {{pair("8", "4"), false}}, {1.0, 0.5, 0.25}, 5.0, {.samples = 64});
  REQUIRE(reps[0].ratios_doubled.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(reps[0].ratios_doubled[i] >= reps[0].ratios[i]);
}
