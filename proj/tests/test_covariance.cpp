#include <doctest.h>

#include <cmath>

#include "ddsa/covariance.hpp"
#include "ddsa/errors.hpp"
#include "test_util.hpp"

using namespace ddsa;
using ddsa::testing::exact_eq;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix swap_matrix() {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}

EquilibriumReport origin_equilibrium() {
  EquilibriumReport eq;
  eq.x_star = Vector::Zero(2);
  eq.interior = true;
  return eq;
}

// Two-player quadratic game with per-player gradients
// B_i x_i + C_i x_{-i} + D_i z_i and data means A_i x_i + A_{-i} x_{-i}.
Problem two_player_game() {
  DecisionMap::PlayerLoss l1{Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.3),
                             Matrix::Constant(1, 1, 0.7), Vector::Zero(1)};
  DecisionMap::PlayerLoss l2{Matrix::Constant(1, 1, 1.5), Matrix::Constant(1, 1, -0.2),
                             Matrix::Constant(1, 1, -0.4), Vector::Zero(1)};
  auto g = DecisionMap::multiplayer_quadratic({l1, l2}, {1, 1}, {1, 1});

  DistributionMap::PlayerBlock b1{Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.1),
                                  Vector::Zero(1), Matrix::Identity(1, 1)};
  DistributionMap::PlayerBlock b2{Matrix::Constant(1, 1, -0.3), Matrix::Constant(1, 1, 0.2),
                                  Vector::Zero(1), Matrix::Identity(1, 1)};
  auto dist = DistributionMap::multiplayer_product({b1, b2}, {1, 1});
  return Problem(FeasibleSet::whole_space(2), std::move(dist), std::move(g));
}

}  // namespace

TEST_CASE("mean map values on the benchmark family") {
  auto p = Problem::swap_gaussian(0.5);
  const Vector r = mean_map(p, vec2(1, 0), Analytic{});
  CHECK((r - vec2(1, -0.5)).norm() < 1e-14);
  const Vector mc = mean_map(p, vec2(1, 0), MonteCarloMode{1000000, 11, 2});
  CHECK((mc - r).norm() < 5e-3);

  auto stat = Problem::swap_gaussian(0.0);
  CHECK((mean_map(stat, vec2(2, 3), Analytic{}) - vec2(2, 3)).norm() == 0.0);

  // R vanishes at the (interior) equilibrium
  CHECK(mean_map(p, Vector::Zero(2), Analytic{}).norm() < 1e-14);
}

TEST_CASE("analytic sigma is the identity at the benchmark equilibrium") {
  auto p = Problem::swap_gaussian(0.5);
  const Matrix sigma = estimate_sigma(p, Vector::Zero(2), SigmaAnalytic{});
  CHECK(exact_eq(sigma, Matrix::Identity(2, 2)));
}

TEST_CASE("noiseless family has zero sigma at its equilibrium") {
  auto dist = DistributionMap::location_scale_gaussian(Matrix::Zero(2, 2), Vector::Zero(2),
                                                       Matrix::Zero(2, 2));
  Problem p(FeasibleSet::whole_space(2), std::move(dist), DecisionMap::quadratic_tracking(2));
  CHECK(estimate_sigma(p, Vector::Zero(2), SigmaAnalytic{}).norm() == 0.0);
}

TEST_CASE("Monte-Carlo sigma concentrates around the analytic value") {
  auto p = Problem::swap_gaussian(0.5);
  const Matrix sigma = estimate_sigma(p, Vector::Zero(2), SigmaMonteCarlo{1000000, 5, 2});
  CHECK(operator_norm(sigma - Matrix::Identity(2, 2)) < 0.01);
  CHECK_THROWS_AS(estimate_sigma(p, Vector::Zero(2), SigmaMonteCarlo{2, 5, 1}),
                  InsufficientSamples);
}

TEST_CASE("analytic W splits into identity static and -rho*swap dynamic parts") {
  auto p = Problem::swap_gaussian(0.5);
  const auto parts = estimate_w(p, Vector::Zero(2), WAnalytic{});
  CHECK(exact_eq(parts.w_static, Matrix::Identity(2, 2)));
  CHECK(exact_eq(parts.w_dynamic, Matrix(-0.5 * swap_matrix())));
  Matrix expected(2, 2);
  expected << 1, -0.5, -0.5, 1;
  CHECK(exact_eq(parts.w, expected));

  auto stat = Problem::swap_gaussian(0.0);
  CHECK(exact_eq(estimate_w(stat, Vector::Zero(2), WAnalytic{}).w, Matrix::Identity(2, 2)));
}

TEST_CASE("central differences reproduce the closed-form W on built-ins") {
  auto p = Problem::swap_gaussian(0.5);
  const auto fd = estimate_w(p, Vector::Zero(2), WCentralDifference{1e-4, Analytic{}});
  const auto exact = estimate_w(p, Vector::Zero(2), WAnalytic{});
  CHECK((fd.w - exact.w).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((fd.w_static - exact.w_static).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((fd.w_dynamic - exact.w_dynamic).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("finite-difference truncation error decays quadratically on a curved field") {
  // nonlinear custom operator with a known Jacobian at the origin:
  // G(x, z) = x + 0.2 sin(x) (componentwise) - z, so dR/dx = (1.2) I - A
  DecisionMap::Custom spec;
  spec.eval = [](const Vector& x, const Vector& z) {
    Vector g = x - z;
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += 0.2 * std::sin(x(i));
    return g;
  };
  spec.decision_dimension = 2;
  spec.data_dimension = 2;
  spec.lipschitz_x = 1.2;
  spec.lipschitz_z = 1.0;
  spec.strong_monotonicity = 1.0;
  Matrix a = 0.25 * swap_matrix();
  auto dist = DistributionMap::location_scale_gaussian(a, Vector::Zero(2), Matrix::Identity(2, 2));
  Problem p(FeasibleSet::whole_space(2), std::move(dist), DecisionMap::custom(spec),
            DeclaredConstants{1.0, 1.0, 0.25});

  const Vector x_star = vec2(0.4, -0.3);  // any interior point with curvature
  Matrix exact_static = Matrix::Identity(2, 2);
  exact_static(0, 0) += 0.2 * std::cos(x_star(0));
  exact_static(1, 1) += 0.2 * std::cos(x_star(1));

  // common random numbers cancel the sampling noise in the differences, so
  // the remaining error is pure O(h^2) truncation
  const MonteCarloMode mc{200000, 77, 2};
  double prev_err = -1.0;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const auto fd = estimate_w(p, x_star, WCentralDifference{h, mc});
    const double err = (fd.w_static - exact_static).cwiseAbs().maxCoeff();
    if (prev_err > 0.0 && prev_err > 1e-9) CHECK(err < prev_err / 3.0);
    prev_err = err;
    // the dynamic part is linear in x, so it is exact at every h
    CHECK((fd.w_dynamic - Matrix(-a)).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("asymptotic covariance matches the symbolic 2x2 oracle") {
  Matrix w(2, 2);
  w << 1, -0.5, -0.5, 1;
  const Matrix c = asymptotic_covariance(Matrix::Identity(2, 2), w);
  // hand computation: W^-2 with det W = 3/4 gives [[20/9, 16/9], [16/9, 20/9]]
  Matrix oracle(2, 2);
  oracle << 20.0 / 9.0, 16.0 / 9.0, 16.0 / 9.0, 20.0 / 9.0;
  CHECK((c - oracle).cwiseAbs().maxCoeff() < 1e-10);

  // generic-solver cross-check through the explicit inverse
  const Matrix winv = w.inverse();
  CHECK((c - winv * winv.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK((asymptotic_covariance(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) -
         Matrix::Identity(2, 2))
            .norm() < 1e-14);
}

TEST_CASE("ill-conditioned regime has eigenvalue 100 along the diagonal direction") {
  Matrix w = Matrix::Identity(2, 2) - 0.9 * swap_matrix();
  const Matrix c = asymptotic_covariance(Matrix::Identity(2, 2), w);
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(100.0).epsilon(1e-9));
  Vector top = es.eigenvectors().col(1);
  CHECK(std::abs(std::abs(top.dot(vec2(1, 1).normalized())) - 1.0) < 1e-9);
}

TEST_CASE("singular W is rejected") {
  Matrix w = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(asymptotic_covariance(Matrix::Identity(2, 2), w), SingularJacobian);
}

TEST_CASE("jacobian positivity check margins") {
  Matrix w(2, 2);
  w << 1, -0.5, -0.5, 1;
  auto check = jacobian_positivity_check(w, 1.0, 0.5, 1.0);
  CHECK(check.ok);
  CHECK(check.lambda_min == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(check.margin == doctest::Approx(0.0).epsilon(1e-10));

  auto ident = jacobian_positivity_check(Matrix::Identity(2, 2), 1.0, 0.0, 1.0);
  CHECK(ident.ok);
  CHECK(ident.lambda_min == doctest::Approx(1.0));

  auto bad = jacobian_positivity_check(Matrix(0.1 * Matrix::Identity(2, 2)), 1.0, 0.5, 1.0);
  CHECK_FALSE(bad.ok);
  CHECK(bad.margin == doctest::Approx(-0.4).epsilon(1e-12));
}

TEST_CASE("mean map is (L + gamma*beta)-Lipschitz with equality on (1,-1)") {
  const double rho = 0.5;
  auto p = Problem::swap_gaussian(rho);
  RandomStream rng(22);
  for (int i = 0; i < 200; ++i) {
    Vector x(2), xp(2);
    rng.fill_standard_normal(x);
    rng.fill_standard_normal(xp);
    const double lhs = (mean_map(p, x, Analytic{}) - mean_map(p, xp, Analytic{})).norm();
    CHECK(lhs <= (1.0 + rho) * (x - xp).norm() + 1e-12);
  }
  const Vector v = vec2(1, -1);
  const double attained =
      (mean_map(p, v, Analytic{}) - mean_map(p, Vector::Zero(2), Analytic{})).norm();
  CHECK(attained == doctest::Approx((1.0 + rho) * v.norm()).epsilon(1e-12));
}

TEST_CASE("two-player game Jacobian matches the block formula") {
  auto p = two_player_game();
  // closed form: row block i = [B_i + D_i A_i, C_i + D_i A_{-i}]
  Matrix expected(2, 2);
  expected(0, 0) = 2.0 + 0.7 * 0.5;
  expected(0, 1) = 0.3 + 0.7 * 0.1;
  expected(1, 0) = -0.2 + (-0.4) * 0.2;
  expected(1, 1) = 1.5 + (-0.4) * (-0.3);

  const auto analytic = estimate_w(p, Vector::Zero(2), WAnalytic{});
  CHECK((analytic.w - expected).cwiseAbs().maxCoeff() < 1e-12);

  const auto fd = estimate_w(p, Vector::Zero(2), WCentralDifference{1e-4, Analytic{}});
  CHECK((fd.w - expected).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("full covariance report is internally consistent") {
  auto p = Problem::swap_gaussian(0.5);
  auto report = covariance_report(p, origin_equilibrium());
  // recomputable from stored factors
  const Matrix recomputed = asymptotic_covariance(report.sigma, report.w);
  CHECK((recomputed - report.asymptotic).norm() <= 1e-10 * report.asymptotic.norm());
  // symmetry and PSD
  CHECK((report.asymptotic - report.asymptotic.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(report.asymptotic);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  // Jacobian positivity at the declared constants
  CHECK(report.min_real_eigenpart_w >= p.alpha() - p.gamma() * p.beta() - 1e-9);
  CHECK_FALSE(report.ill_conditioned);
  CHECK(report.sigma_provenance.mode == "analytic");
}

TEST_CASE("non-interior equilibria cannot feed the Jacobian machinery") {
  auto p = Problem::swap_gaussian(0.5);
  EquilibriumReport eq = origin_equilibrium();
  eq.interior = false;
  CHECK_THROWS_AS(covariance_report(p, eq), UnsupportedMode);
}
