#include <doctest.h>

#include <cmath>

#include "ddsa/equilibrium.hpp"
#include "ddsa/errors.hpp"
#include "test_util.hpp"

using namespace ddsa;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Problem boxed_swap(double rho, double half_width, Vector base_mean = Vector::Zero(2)) {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(rho * swap, std::move(base_mean),
                                                       Matrix::Identity(2, 2));
  return Problem(FeasibleSet::box(vec2(-half_width, -half_width), vec2(half_width, half_width)),
                 std::move(dist), DecisionMap::quadratic_tracking(2),
                 DeclaredConstants{1.0, 1.0, rho});
}

}  // namespace

TEST_CASE("inner VI solution matches the closed form on the whole space") {
  auto p = Problem::swap_gaussian(0.5);
  const Vector y = solve_inner_vi(p, vec2(1, 0), 1e-10, Analytic{});
  CHECK((y - vec2(0, 0.5)).norm() < 1e-10);
  const Vector y0 = solve_inner_vi(p, vec2(0, 0), 1e-10, Analytic{});
  CHECK(y0.norm() < 1e-10);
}

TEST_CASE("inner VI under a box clamps the unconstrained solution (KKT oracle)") {
  auto p = boxed_swap(0.5, 0.2);
  const Vector x = vec2(1, 0);
  const Vector y = solve_inner_vi(p, x, 1e-12, Analytic{});
  CHECK((y - vec2(0, 0.2)).norm() < 1e-10);

  // brute-force grid search over the box: y must minimize the projected
  // residual ||q - proj(q - G_x(q))||
  auto residual = [&](const Vector& q) {
    const Vector g = mean_field(p, x, q, Analytic{});
    return (q - p.set().project(q - g)).norm();
  };
  const double ry = residual(y);
  const int n = 201;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vector q = vec2(-0.2 + 0.4 * i / (n - 1), -0.2 + 0.4 * j / (n - 1));
      CHECK(residual(q) >= ry - 1e-9);
    }
  }
}

TEST_CASE("equilibrium of the benchmark family is the origin with ratio rho") {
  auto p = Problem::swap_gaussian(0.5);
  EquilibriumOptions opts;
  opts.outer_tol = 1e-9;
  opts.inner_tol = 1e-12;
  auto report = find_equilibrium(p, vec2(5, -3), opts);
  CHECK(report.x_star.norm() < 1e-8);
  CHECK(report.observed_contraction_ratio == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(report.residual_norm <= opts.outer_tol);
  CHECK(report.interior);
}

TEST_CASE("static problems converge in one outer iteration") {
  auto p = Problem::swap_gaussian(0.0);
  auto report = find_equilibrium(p, vec2(4, 4));
  CHECK(report.outer_iterations == 1);
  CHECK(report.x_star.norm() < 1e-12);
}

TEST_CASE("outer iteration count follows the geometric-decay oracle at rho = 0.9") {
  const double rho = 0.9;
  auto p = Problem::swap_gaussian(rho);
  EquilibriumOptions opts;
  opts.outer_tol = 1e-8;
  const Vector x0 = vec2(5, -3);
  auto report = find_equilibrium(p, x0, opts);
  CHECK(report.x_star.norm() < 1e-8);
  CHECK(report.observed_contraction_ratio == doctest::Approx(rho).epsilon(1e-6));

  // geometric-decay count: increments delta_k = delta_1 * rho^(k-1) run until
  // the a-posteriori threshold outer_tol * (1 - q) / q
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  const double delta1 = (rho * swap * x0 - x0).norm();
  const double threshold = opts.outer_tol * (1.0 - rho) / rho;
  const auto predicted =
      1 + static_cast<std::int64_t>(std::ceil(std::log(threshold / delta1) / std::log(rho)));
  // the residual certificate may append a few extra contraction steps
  CHECK(report.outer_iterations >= predicted - 3);
  CHECK(report.outer_iterations <= predicted + 10);
}

TEST_CASE("solution map is exactly rho-Lipschitz on the benchmark family") {
  const double rho = 0.5;
  auto p = Problem::swap_gaussian(rho);
  RandomStream rng(17);
  for (int i = 0; i < 100; ++i) {
    Vector x(2), xp(2);
    rng.fill_standard_normal(x);
    rng.fill_standard_normal(xp);
    const Vector sx = solve_inner_vi(p, x, 1e-13, Analytic{});
    const Vector sxp = solve_inner_vi(p, xp, 1e-13, Analytic{});
    CHECK((sx - sxp).norm() == doctest::Approx(rho * (x - xp).norm()).epsilon(1e-9));
  }
}

TEST_CASE("fixed-point residual certificate holds at the returned point") {
  auto p = Problem::swap_gaussian(0.25);
  EquilibriumOptions opts;
  opts.outer_tol = 1e-10;
  auto report = find_equilibrium(p, vec2(2, 2), opts);
  const Vector sol = solve_inner_vi(p, report.x_star, 1e-13, Analytic{});
  CHECK((sol - report.x_star).norm() <= opts.outer_tol);
}

TEST_CASE("boundary equilibria are flagged as non-interior") {
  auto p = boxed_swap(0.5, 0.2, vec2(1, 1));
  auto report = find_equilibrium(p, vec2(0, 0));
  CHECK((report.x_star - vec2(0.2, 0.2)).norm() < 1e-9);
  CHECK_FALSE(report.interior);
}

TEST_CASE("contraction violations are detected under false declared constants") {
  // the true mean map doubles the decision, but the declared constants
  // promise a 0.5-contraction
  DistributionMap::Custom spec;
  spec.sampler = [](const Vector& x, RandomStream&) { return Vector(2.0 * x); };
  spec.mean = [](const Vector& x) { return Vector(2.0 * x); };
  spec.decision_dimension = 2;
  spec.data_dimension = 2;
  spec.wasserstein_lipschitz = 2.0;
  Problem p(FeasibleSet::whole_space(2), DistributionMap::custom(spec),
            DecisionMap::quadratic_tracking(2), DeclaredConstants{1.0, 1.0, 0.5});
  CHECK_THROWS_AS(find_equilibrium(p, vec2(1, 1)), ContractionViolation);
}

TEST_CASE("Monte-Carlo expectations converge to the noise floor") {
  auto p = Problem::swap_gaussian(0.5);
  EquilibriumOptions opts;
  opts.mode = MonteCarloMode{200000, 818, 2};
  auto report = find_equilibrium(p, vec2(3, 3), opts);
  CHECK(report.noise_floor > 0.0);
  // equilibrium recovered up to the sampling floor of the solution map
  CHECK(report.x_star.norm() < 0.02);
  CHECK(report.observed_contraction_ratio < 0.7);
}

TEST_CASE("audit recovers the closed-form constants of the benchmark family") {
  auto p = Problem::swap_gaussian(0.5);
  auto audit = audit_assumptions(p, Vector::Zero(2), 0.5, 64, 2026);
  CHECK(audit.alpha_estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(audit.beta_estimate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(audit.gamma_estimate == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(audit.gamma_is_heuristic);
  // E||xi||^2 = trace(I_2) = 2 at the equilibrium
  CHECK(audit.variance_bound_estimate > 2 * 0.9);
  CHECK(audit.variance_bound_estimate < 2 * 1.3);
}

TEST_CASE("audit of the noiseless family reports a zero variance bound") {
  auto dist = DistributionMap::location_scale_gaussian(Matrix::Zero(2, 2), Vector::Zero(2),
                                                       Matrix::Zero(2, 2));
  Problem p(FeasibleSet::whole_space(2), std::move(dist), DecisionMap::quadratic_tracking(2));
  auto audit = audit_assumptions(p, Vector::Zero(2), 0.5, 16, 7);
  CHECK(audit.variance_bound_estimate == 0.0);
}

TEST_CASE("audit estimates are monotone in the probe count under a fixed seed") {
  auto p = Problem::swap_gaussian(0.5);
  auto a = audit_assumptions(p, Vector::Zero(2), 0.5, 32, 99, 2000);
  auto b = audit_assumptions(p, Vector::Zero(2), 0.5, 64, 99, 2000);
  CHECK(b.alpha_estimate <= a.alpha_estimate + 1e-15);
  CHECK(b.beta_estimate >= a.beta_estimate - 1e-15);
  CHECK(b.variance_bound_estimate >= a.variance_bound_estimate - 1e-15);
  CHECK_THROWS_AS(audit_assumptions(p, Vector::Zero(2), 0.5, 1, 99), InvalidArgument);
}
