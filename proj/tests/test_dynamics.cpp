#include <doctest.h>

#include <cmath>

#include "ddsa/sfb.hpp"
#include "test_util.hpp"

using namespace ddsa;
using ddsa::testing::exact_eq;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Point mass at a fixed data value: G(x, z0) is deterministic.
Problem point_mass(const Vector& z0, FeasibleSet set) {
  auto dist = DistributionMap::location_scale_gaussian(
      Matrix::Zero(2, 2), z0, Matrix::Zero(2, 2));
  return Problem(std::move(set), std::move(dist), DecisionMap::quadratic_tracking(2));
}

}  // namespace

TEST_CASE("step schedule values and t = 0 convention") {
  StepSchedule s(1.0, 0.75);
  CHECK(s.eta(16) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(s.eta(0) == 1.0);
  CHECK(s.eta(1) == 1.0);
  StepSchedule s2(0.5, 0.6);
  CHECK(s2.eta(32) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK_THROWS_AS(StepSchedule(0.0, 0.75), InvalidArgument);
  CHECK_THROWS_AS(StepSchedule(1.0, 1.5), InvalidArgument);
}

TEST_CASE("unconstrained step is plain arithmetic with zero residual") {
  // G(x, z) = x - z = (1, 2) at x = 0 with the point mass at (-1, -2)
  auto p = point_mass(vec2(-1, -2), FeasibleSet::whole_space(2));
  RandomStream rng(1);
  const auto r = sfb_step(p, vec2(0, 0), 0.1, rng);
  CHECK((r.next_x - vec2(-0.1, -0.2)).norm() < 1e-15);
  CHECK(exact_eq(r.residual, Vector::Zero(2)));
}

TEST_CASE("zero step size leaves the iterate unchanged") {
  auto p = Problem::swap_gaussian(0.5);
  RandomStream rng(2);
  const Vector x = vec2(0.3, -0.4);
  const auto r = sfb_step(p, x, 0.0, rng);
  CHECK(exact_eq(r.next_x, x));
  CHECK(exact_eq(r.residual, Vector::Zero(2)));
}

TEST_CASE("clipped step reports the projection residual") {
  auto p = point_mass(vec2(-1, -2), FeasibleSet::box(vec2(-0.05, -0.05), vec2(0.05, 0.05)));
  RandomStream rng(3);
  const auto r = sfb_step(p, vec2(0, 0), 0.1, rng);
  CHECK(exact_eq(r.next_x, vec2(-0.05, -0.05)));
  // ((-0.1,-0.2) - (-0.05,-0.05)) / 0.1
  CHECK((r.residual - vec2(-0.5, -1.5)).norm() < 1e-12);
  CHECK(r.residual.norm() > 0.0);
}

TEST_CASE("single step from the noiseless fixed point stays put") {
  auto p = point_mass(vec2(0, 0), FeasibleSet::whole_space(2));
  auto traj = run_sfb(p, vec2(0, 0), StepSchedule(1.0, 0.75), 1, 7);
  CHECK(exact_eq(traj.final_x, Vector::Zero(2)));
  CHECK(exact_eq(traj.final_xbar, Vector::Zero(2)));
}

TEST_CASE("replays with the same seed are bit-identical") {
  auto p = Problem::swap_gaussian(0.5);
  RecordPlan plan;
  plan.checkpoints = {10, 100, 1000};
  auto a = run_sfb(p, vec2(5, 5), StepSchedule(1.0, 0.75), 1000, 31337, plan);
  auto b = run_sfb(p, vec2(5, 5), StepSchedule(1.0, 0.75), 1000, 31337, plan);
  REQUIRE(a.checkpoints.size() == b.checkpoints.size());
  for (std::size_t i = 0; i < a.checkpoints.size(); ++i) {
    CHECK(exact_eq(a.checkpoints[i].x, b.checkpoints[i].x));
    CHECK(exact_eq(a.checkpoints[i].xbar, b.checkpoints[i].xbar));
  }
  CHECK(exact_eq(a.final_x, b.final_x));
  CHECK(exact_eq(a.final_xbar, b.final_xbar));
}

TEST_CASE("iterates converge toward the equilibrium at the benchmark problem") {
  auto p = Problem::swap_gaussian(0.5);
  const StepSchedule sched(1.0, 0.75);
  int inside = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    auto traj = run_sfb(p, vec2(5, 5), sched, 100000, 1000 + static_cast<std::uint64_t>(s));
    if (traj.final_x.norm() < 0.5) ++inside;
  }
  CHECK(inside >= 99);  // threshold set by pilot runs at the 99th percentile
}

TEST_CASE("running average agrees with direct recomputation at checkpoints") {
  auto p = Problem::swap_gaussian(0.25);
  RecordPlan plan;
  plan.checkpoints = {1, 7, 100, 2500, 10000};
  plan.thin = 1;
  auto traj = run_sfb(p, vec2(2, -1), StepSchedule(0.5, 0.75), 10000, 99, plan);
  for (const auto& cp : traj.checkpoints) {
    if (cp.t == 0) continue;
    Vector direct = Vector::Zero(2);
    for (std::int64_t t = 0; t < cp.t; ++t) {
      REQUIRE(traj.iterates[static_cast<std::size_t>(t)].first == t);
      direct += traj.iterates[static_cast<std::size_t>(t)].second;
    }
    direct /= static_cast<double>(cp.t);
    CHECK((direct - cp.xbar).norm() <= 1e-10 * (1.0 + direct.norm()));
  }
}

TEST_CASE("every recorded iterate is feasible under box constraints") {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(0.5 * swap, Vector::Zero(2),
                                                       Matrix::Identity(2, 2));
  Problem p(FeasibleSet::box(vec2(-0.5, -0.5), vec2(0.5, 0.5)), std::move(dist),
            DecisionMap::quadratic_tracking(2), DeclaredConstants{1.0, 1.0, 0.5});
  RecordPlan plan;
  plan.thin = 13;
  auto traj = run_sfb(p, vec2(0.5, 0.5), StepSchedule(1.0, 0.75), 20000, 4, plan);
  for (const auto& [t, x] : traj.iterates) CHECK(p.set().contains(x));
}

TEST_CASE("projection residuals vanish along converging interior runs") {
  // interior equilibrium of the benchmark family inside a generous box
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(0.5 * swap, Vector::Zero(2),
                                                       Matrix::Identity(2, 2));
  Problem p(FeasibleSet::box(vec2(-3, -3), vec2(3, 3)), std::move(dist),
            DecisionMap::quadratic_tracking(2), DeclaredConstants{1.0, 1.0, 0.5});
  auto traj = run_sfb(p, vec2(2.5, 2.5), StepSchedule(1.0, 0.75), 100000, 11);
  CHECK(traj.clipped_steps_last_decile == 0);
}

TEST_CASE("burn-in drops the leading iterates from the average") {
  auto p = Problem::swap_gaussian(0.25);
  RecordPlan plan;
  plan.thin = 1;
  plan.burnin = 50;
  auto traj = run_sfb(p, vec2(3, 3), StepSchedule(1.0, 0.75), 200, 123, plan);
  Vector direct = Vector::Zero(2);
  for (std::int64_t t = 50; t < 200; ++t)
    direct += traj.iterates[static_cast<std::size_t>(t)].second;
  direct /= 150.0;
  CHECK((direct - traj.final_xbar).norm() <= 1e-12 * (1.0 + direct.norm()));
}

TEST_CASE("infeasible starts and bad horizons are rejected") {
  auto p = Problem::swap_gaussian(0.5);
  CHECK_THROWS_AS(run_sfb(p, vec2(0, 0), StepSchedule(1.0, 0.75), 0, 1), InvalidArgument);
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(0.5 * swap, Vector::Zero(2),
                                                       Matrix::Identity(2, 2));
  Problem boxed(FeasibleSet::box(vec2(-1, -1), vec2(1, 1)), std::move(dist),
                DecisionMap::quadratic_tracking(2), DeclaredConstants{1.0, 1.0, 0.5});
  CHECK_THROWS_AS(run_sfb(boxed, vec2(2, 0), StepSchedule(1.0, 0.75), 10, 1), InvalidArgument);
}

TEST_CASE("non-finite operator evaluations fail with the step index") {
  DecisionMap::Custom bad;
  bad.eval = [](const Vector& x, const Vector& z) {
    Vector g = x - z;
    g(0) = std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  bad.decision_dimension = 2;
  bad.data_dimension = 2;
  bad.lipschitz_x = 1.0;
  bad.lipschitz_z = 1.0;
  bad.strong_monotonicity = 1.0;
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(0.25 * swap, Vector::Zero(2),
                                                       Matrix::Identity(2, 2));
  Problem p(FeasibleSet::whole_space(2), std::move(dist), DecisionMap::custom(bad),
            DeclaredConstants{1.0, 1.0, 0.25});
  CHECK_THROWS_AS(run_sfb(p, vec2(0, 0), StepSchedule(1.0, 0.75), 10, 1), NumericalFailure);
}
