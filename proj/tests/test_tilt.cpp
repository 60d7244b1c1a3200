#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ddsa/errors.hpp"
#include "ddsa/covariance.hpp"
#include "ddsa/tilt.hpp"
#include "test_util.hpp"

using namespace ddsa;
using ddsa::testing::exact_eq;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

// Simpson quadrature over [-10, 10].
double quad(const std::function<double(double)>& f) {
  const int n = 20000;  // even
  const double a = -10.0, b = 10.0;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Bounded-support family: z = 0.3 * swap(x) + uniform(-0.4, 0.4)^2, with the
// tilt map g = z - mean(x). Consumes exactly 2 uniforms per draw.
Problem bounded_uniform_problem() {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  DistributionMap::Custom spec;
  spec.sampler = [swap](const Vector& x, RandomStream& rng) {
    Vector z(2);
    z(0) = 0.8 * rng.next_uniform() - 0.4;
    z(1) = 0.8 * rng.next_uniform() - 0.4;
    return Vector(0.3 * swap * x + z);
  };
  spec.mean = [swap](const Vector& x) { return Vector(0.3 * swap * x); };
  spec.decision_dimension = 2;
  spec.data_dimension = 2;
  spec.wasserstein_lipschitz = 0.3;
  return Problem(FeasibleSet::whole_space(2), DistributionMap::custom(spec),
                 DecisionMap::quadratic_tracking(2), DeclaredConstants{1.0, 1.0, 0.3});
}

TiltSpec bounded_uniform_tilt(Vector u) {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  TiltSpec tilt = TiltSpec::canonical(std::move(u));
  tilt.map_kind = TiltSpec::MapKind::Custom;
  tilt.custom_map = [swap](const Vector& x, const Vector& z) {
    return Vector(z - 0.3 * swap * x);
  };
  return tilt;
}

}  // namespace

TEST_CASE("saturation is the identity on the core and bounded everywhere") {
  auto h = SaturationFunction::c3_blend();
  CHECK(h.value(0.3) == 0.3);  // bitwise
  CHECK(h.value(-0.47) == -0.47);
  CHECK(h.value(0.0) == 0.0);
  CHECK(h.d1(0.0) == 1.0);
  CHECK(h.d2(0.0) == 0.0);
  for (double t = -20.0; t <= 20.0; t += 0.001) {
    CHECK(std::abs(h.value(t)) <= 1.0 + 1e-15);
    CHECK(h.value(-t) == doctest::Approx(-h.value(t)).epsilon(1e-15));
  }
  CHECK(h.value(1.5) == 1.0);
  CHECK(h.value(100.0) == 1.0);
  CHECK(h.value(-100.0) == -1.0);
}

TEST_CASE("saturation derivatives agree on both sides of each knot") {
  auto h = SaturationFunction::c3_blend();
  for (double knot : {0.5, 1.5, -0.5, -1.5}) {
    const double eps = 1e-9;
    const double lo = knot - eps, hi = knot + eps;
    CHECK(h.value(lo) == doctest::Approx(h.value(hi)).epsilon(1e-8));
    CHECK(std::abs(h.d1(lo) - h.d1(hi)) < 1e-7);
    CHECK(std::abs(h.d2(lo) - h.d2(hi)) < 1e-6);
    CHECK(std::abs(h.d3(lo) - h.d3(hi)) < 1e-5);
  }
}

TEST_CASE("one-sided finite differences certify C3 smoothness at the knots") {
  auto h = SaturationFunction::c3_blend();
  // 4th-order one-sided stencils for f', applied to h, h', h''
  auto one_sided = [](const std::function<double(double)>& f, double x0, double step) {
    return (-25.0 * f(x0) + 48.0 * f(x0 + step) - 36.0 * f(x0 + 2 * step) +
            16.0 * f(x0 + 3 * step) - 3.0 * f(x0 + 4 * step)) /
           (12.0 * step);
  };
  std::vector<std::function<double(double)>> fns = {
      [&](double t) { return h.value(t); },
      [&](double t) { return h.d1(t); },
      [&](double t) { return h.d2(t); },
  };
  for (double knot : {0.5, 1.5}) {
    for (auto& f : fns) {
      const double right = one_sided(f, knot, 1e-3);
      const double left = one_sided(f, knot, -1e-3);
      CHECK(std::abs(right - left) < 1e-6);
    }
  }
}

TEST_CASE("normalizer is exactly one at u = 0 and always within [0, 2]") {
  auto p = Problem::swap_gaussian(0.5);
  auto zero = TiltSpec::canonical(Vector::Zero(2));
  CHECK(normalizer(p, zero, Vector::Zero(2), 1000, 9) == 1.0);

  auto small = TiltSpec::canonical(vec2(0.1, 0));
  const double c = normalizer(p, small, Vector::Zero(2), 1000000, 10);
  CHECK(std::abs(c - 1.0) < 1e-3);

  auto huge = TiltSpec::canonical(vec2(100, 0));
  const double ch = normalizer(p, huge, Vector::Zero(2), 10000, 11);
  CHECK(ch >= 0.0);
  CHECK(ch <= 2.0);
}

TEST_CASE("zero tilt thins uniformly: acceptance 1/2, law unchanged") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  RandomStream rng(12);
  const int n = 200000;
  std::int64_t proposals = 0;
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < n; ++i) mean += sample_tilted(p, tilt, vec2(1, 0), rng, &proposals);
  mean /= n;
  const double rate = static_cast<double>(n) / static_cast<double>(proposals);
  CHECK(std::abs(rate - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(n)));
  // base mean at x = (1, 0) is (0, 0.5)
  CHECK(std::abs(mean(0) - 0.0) < 4.0 / std::sqrt(n / 2.0));
  CHECK(std::abs(mean(1) - 0.5) < 4.0 / std::sqrt(n / 2.0));
}

TEST_CASE("positive tilt along -z pushes the first data coordinate negative") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(vec2(0.5, 0));
  const auto& h = tilt.saturation;

  // 1-d quadrature oracle: tilted mean of z1 with g = -z at the origin
  const double c = 1.0 + quad([&](double z) { return h.value(-0.5 * z) * phi(z); });
  const double oracle = quad([&](double z) { return z * (1.0 + h.value(-0.5 * z)) * phi(z); }) / c;
  CHECK(oracle < -0.1);  // the push is material

  RandomStream rng(13);
  const int n = 1000000;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector z = sample_tilted(p, tilt, Vector::Zero(2), rng);
    mean += z(0);
    sq += z(0) * z(0);
  }
  mean /= n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - oracle) < 4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("tilting orthogonally to the support leaves the law unchanged") {
  auto p = Problem::swap_gaussian(0.5);
  TiltSpec tilt = TiltSpec::canonical(vec2(0, 1));
  tilt.map_kind = TiltSpec::MapKind::Custom;
  tilt.custom_map = [](const Vector& x, const Vector& z) {
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const Vector mean = 0.5 * swap * x;
    return vec2(z(0) - mean(0), 0.0);  // supported on the first coordinate only
  };
  RandomStream rng(14);
  const int n = 200000;
  Vector mean = Vector::Zero(2);
  for (int i = 0; i < n; ++i) mean += sample_tilted(p, tilt, vec2(1, 0), rng);
  mean /= n;
  const double se = 1.0 / std::sqrt(n / 2.0);
  CHECK(std::abs(mean(0) - 0.0) < 4 * se);
  CHECK(std::abs(mean(1) - 0.5) < 4 * se);
}

TEST_CASE("rejection acceptance rate matches C/2 under an asymmetric tilt") {
  auto p = Problem::swap_gaussian(0.5);
  TiltSpec tilt = TiltSpec::canonical(vec2(0.6, 0));
  tilt.map_kind = TiltSpec::MapKind::Custom;
  tilt.custom_map = [](const Vector& x, const Vector& z) {
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const double eps = z(0) - 0.5 * (swap * x)(0);
    return vec2(eps * eps - 1.0, 0.0);  // mean-zero, even in the noise
  };
  const auto& h = tilt.saturation;
  const double c_oracle =
      1.0 + quad([&](double e) { return h.value(0.6 * (e * e - 1.0)) * phi(e); });
  CHECK(std::abs(c_oracle - 1.0) > 0.01);  // genuinely asymmetric

  RandomStream rng(15);
  const int n = 300000;
  std::int64_t proposals = 0;
  for (int i = 0; i < n; ++i) (void)sample_tilted(p, tilt, vec2(0.3, -0.2), rng, &proposals);
  const double rate = static_cast<double>(n) / static_cast<double>(proposals);
  const double target = c_oracle / 2.0;
  const double se = std::sqrt(target * (1 - target) / static_cast<double>(proposals));
  CHECK(std::abs(rate - target) < 3 * se + 1e-4);

  // density ratio stays nonnegative even deep in the saturated region
  RandomStream probe(16);
  for (int i = 0; i < 1000; ++i) {
    Vector z = sample(p, vec2(0.3, -0.2), probe);
    const double w = 1.0 + h.value(tilt.custom_map(vec2(0.3, -0.2), z).dot(vec2(50, 0)));
    CHECK(w >= 0.0);
  }
}

TEST_CASE("canonical tilt maps are mean-zero at random decisions") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(vec2(0.1, 0));
  RandomStream xrng(17);
  for (int probe = 0; probe < 5; ++probe) {
    Vector x(2);
    xrng.fill_standard_normal(x);
    RandomStream rng = RandomStream::substream(18, static_cast<std::uint64_t>(probe));
    const int n = 100000;
    Vector mean = Vector::Zero(2);
    for (int i = 0; i < n; ++i) mean += tilt_g(p, tilt, x, sample(p, x, rng));
    mean /= n;
    const double se = 1.0 / std::sqrt(static_cast<double>(n));  // unit noise per coordinate
    CHECK(mean.cwiseAbs().maxCoeff() < 4 * se);
  }
}

TEST_CASE("perturbed equilibrium tracks the first-order expansion") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  TiltedEquilibriumOptions opts;
  opts.samples = 1000000;
  opts.seed = 97;
  opts.outer.outer_tol = 1e-9;

  const auto base = perturbed_equilibrium(p, tilt, Vector::Zero(2), Vector::Zero(2), opts);
  CHECK(base.x_star.norm() < 5e-3);  // Monte-Carlo floor around the true origin

  Matrix w(2, 2);
  w << 1, -0.5, -0.5, 1;

  // larger tilt: absolute agreement against the expansion
  {
    const Vector u = vec2(0.04, 0);
    const Vector predicted = -w.inverse() * u;
    const auto r = perturbed_equilibrium(p, tilt.with_direction(u), u, Vector::Zero(2), opts);
    CHECK((r.x_star - predicted).norm() < 0.15 * predicted.norm());
  }

  // small tilt: common random numbers cancel the shared noise, so the
  // difference from the base solve tracks the expansion tightly
  {
    const Vector u = vec2(0.01, 0);
    const Vector predicted = -w.inverse() * u;
    const auto r = perturbed_equilibrium(p, tilt.with_direction(u), u, Vector::Zero(2), opts);
    CHECK(((r.x_star - base.x_star) - predicted).norm() < 0.15 * predicted.norm());

    // sign flip: antisymmetric to first order
    const Vector mu = -u;
    const auto rm = perturbed_equilibrium(p, tilt.with_direction(mu), mu, Vector::Zero(2), opts);
    CHECK(((rm.x_star - base.x_star) + (r.x_star - base.x_star)).norm() <
          0.2 * predicted.norm());
  }
}

TEST_CASE("equilibrium shift ratios sit at or below the Monte-Carlo floor") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  TiltedEquilibriumOptions opts;
  opts.samples = 500000;
  opts.seed = 1234;
  auto table =
      equilibrium_shift_check(p, tilt, {0.04, 0.02, 0.01}, vec2(1, 0), Vector::Zero(2), opts);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.noise_floor > 0.0);
  for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
    CHECK(table.rows[i + 1].ratio <= table.rows[i].ratio + 2.0 * table.noise_floor);
  }
  // every ratio certifies the expansion to well under 15% relative error
  const double rel = 0.15 * (table.w.inverse() * vec2(1, 0)).norm();
  for (const auto& row : table.rows) CHECK(row.ratio < rel);
}

TEST_CASE("shift table conventions: zero row and static problems") {
  auto p = Problem::swap_gaussian(0.0);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  TiltedEquilibriumOptions opts;
  opts.samples = 400000;
  opts.seed = 4321;
  auto table = equilibrium_shift_check(p, tilt, {0.0, 0.05}, vec2(1, 0), Vector::Zero(2), opts);
  CHECK(table.rows[0].ratio == 0.0);
  // W = I and Sigma_cross = I: the shift is -u itself
  CHECK((table.rows[1].x_star_u - table.x_star_base + vec2(0.05, 0)).norm() <
        0.15 * 0.05);
}

TEST_CASE("log-likelihood ratio vanishes identically at u = 0") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  auto report = lan_statistic(p, tilt, Vector::Zero(2), 500, StepSchedule(1.0, 0.75),
                              Vector::Zero(2), 8, 55);
  CHECK(report.log_lr.cwiseAbs().maxCoeff() == 0.0);
  CHECK(report.observed_mean == 0.0);
  CHECK(report.observed_variance == 0.0);
}

TEST_CASE("LAN statistics match the Gaussian-shift prediction") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(vec2(0.1, 0));
  LanOptions opts;
  opts.workers = 2;
  opts.normalizer_samples = 2000;
  auto report = lan_statistic(p, tilt, vec2(0.1, 0), 2000, StepSchedule(1.0, 0.75),
                              Vector::Zero(2), 100, 606, opts);
  // Sigma_g = I for this family at every decision, so the LAN limit predicts
  // mean -0.005 and variance 0.01
  CHECK(std::abs(report.observed_mean - (-0.005)) < 3.0 * report.se_mean);
  CHECK(std::abs(report.observed_variance - 0.01) < 3.0 * report.se_variance);
  CHECK(operator_norm(report.sigma_g - Matrix::Identity(2, 2)) < 0.05);
  CHECK(operator_norm(report.zk_covariance - report.sigma_g) < 0.35);
  CHECK(report.predicted_mean == doctest::Approx(-0.005).epsilon(0.05));
  CHECK(report.predicted_variance == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("log-likelihood drift and variance are linked two-to-one") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(vec2(0.1, 0));
  LanOptions opts;
  opts.workers = 2;
  opts.normalizer_samples = 200;  // C = 1 up to odd symmetry here; keep it cheap
  auto report = lan_statistic(p, tilt, vec2(0.1, 0), 100, StepSchedule(1.0, 0.75),
                              Vector::Zero(2), 50000, 707, opts);
  const double ratio = report.observed_variance / (-report.observed_mean);
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("inside the identity region the blend and the identity agree bitwise") {
  auto p = bounded_uniform_problem();
  const Vector u = vec2(0.5, 0.5);

  auto run = [&](SaturationFunction h) {
    TiltSpec tilt = bounded_uniform_tilt(u);
    tilt.saturation = h;
    LanOptions opts;
    opts.normalizer_samples = 500;
    return lan_statistic(p, tilt, u, 100, StepSchedule(1.0, 0.75), Vector::Zero(2), 20, 99,
                         opts);
  };
  auto blend = run(SaturationFunction::c3_blend());
  auto ident = run(SaturationFunction::identity());
  CHECK(exact_eq(Vector(blend.log_lr), Vector(ident.log_lr)));
  CHECK(exact_eq(blend.z_samples, ident.z_samples));
}

TEST_CASE("a saturated-negative tilt starves the rejection sampler") {
  auto p = Problem::swap_gaussian(0.5);
  TiltSpec tilt = TiltSpec::canonical(vec2(1, 0));
  tilt.map_kind = TiltSpec::MapKind::Custom;
  tilt.custom_map = [](const Vector&, const Vector&) { return vec2(-5.0, 0.0); };
  RandomStream rng(1);
  CHECK_THROWS_AS(sample_tilted(p, tilt, Vector::Zero(2), rng), DegenerateTilt);
}

TEST_CASE("exhausting the normalizer budget widens the uncertainty instead of failing") {
  auto p = bounded_uniform_problem();
  const Vector u = vec2(0.5, 0.5);
  TiltSpec tilt = bounded_uniform_tilt(u);
  LanOptions opts;
  opts.normalizer_samples = 200;
  opts.normalizer_budget = 1;  // one cell, then fall back
  auto report = lan_statistic(p, tilt, u, 50, StepSchedule(1.0, 0.75), Vector::Zero(2), 10, 3,
                              opts);
  CHECK(report.normalizer_fallbacks > 0);
  // widened: reported uncertainty strictly exceeds the pure sample error
  const double plain_se = std::sqrt(report.observed_variance / 10.0);
  CHECK(report.se_mean > plain_se);
}

TEST_CASE("f-divergence estimates follow the quadratic expansion") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));

  const auto zero = f_divergence_estimate(p, tilt, Vector::Zero(2),
                                          FDivergenceKind::KullbackLeibler, Vector::Zero(2),
                                          100000, 31);
  CHECK(zero.value == 0.0);

  const auto kl = f_divergence_estimate(p, tilt, vec2(0.1, 0),
                                        FDivergenceKind::KullbackLeibler, Vector::Zero(2),
                                        200000, 32);
  CHECK(std::abs(kl.value - 0.005) < 0.001);
  CHECK(std::abs(kl.prediction - 0.005) < 0.0005);

  const auto chi2 = f_divergence_estimate(p, tilt, vec2(0.1, 0), FDivergenceKind::ChiSquared,
                                          Vector::Zero(2), 200000, 33);
  CHECK(std::abs(chi2.value - 0.01) < 0.002);
  CHECK(std::abs(chi2.prediction - 0.01) < 0.001);
}

TEST_CASE("minimax probe: benchmark, zero-tilt column and trivial losses") {
  auto p = Problem::swap_gaussian(0.5);
  auto tilt = TiltSpec::canonical(Vector::Zero(2));
  Matrix w(2, 2);
  w << 1, -0.5, -0.5, 1;
  const Matrix cov = asymptotic_covariance(Matrix::Identity(2, 2), w);

  MinimaxOptions opts;
  opts.replicas = 200;
  opts.workers = 2;
  opts.benchmark_samples = 1000000;
  // sqrt(k) amplifies any error in x*_u, so the equilibrium solve gets a
  // large budget here
  opts.equilibrium.samples = 4000000;
  opts.equilibrium.seed = 11;

  auto probe = minimax_risk_probe(p, tilt, {Vector::Zero(2)}, 100000, StepSchedule(1.0, 0.75),
                                  Vector::Zero(2), LossKind::SquaredNorm, cov, 2027, opts);
  // E||Z||^2 = trace(W^-2) = 40/9
  CHECK(std::abs(probe.benchmark - 40.0 / 9.0) < 0.05);
  // the averaged SFB estimator at u = 0 is the upper matching bound
  CHECK(std::abs(probe.rows[0].risk - probe.benchmark) < 0.2 * probe.benchmark);

  MinimaxOptions ind = opts;
  ind.replicas = 20;
  ind.benchmark_samples = 10000;
  ind.indicator_radius = std::numeric_limits<double>::infinity();
  auto trivial = minimax_risk_probe(p, tilt, {Vector::Zero(2), vec2(0.01, 0)}, 100,
                                    StepSchedule(1.0, 0.75), Vector::Zero(2),
                                    LossKind::IndicatorOutsideBall, cov, 5, ind);
  CHECK(trivial.max_risk == 0.0);
  CHECK(trivial.benchmark == 0.0);
}
