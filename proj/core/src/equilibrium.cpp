/*
   Copyright 2026 the ddsa authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/
#include "ddsa/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ddsa/errors.hpp"

namespace ddsa {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool is_monte_carlo(const ExpectationMode& mode) {
  return std::holds_alternative<MonteCarloMode>(mode);
}

/// Natural-map residual ||x - proj(x - G_x(x))||.
double natural_residual(const Problem& p, const Vector& x, const ExpectationMode& mode) {
  const Vector g = mean_field(p, x, x, mode);
  return (x - p.set().project(x - g)).norm();
}

}  // namespace

Vector solve_inner_vi(const Problem& p, const Vector& x, double tol, const ExpectationMode& mode,
                      std::int64_t max_iter) {
  if (!(tol > 0.0)) throw InvalidArgument("inner VI tolerance must be positive");
  const double alpha = p.alpha();
  const double lbar = p.lipschitz_bar();
  if (!(alpha > 0.0)) throw InvalidArgument("inner VI solver requires alpha > 0");
  const double step = alpha / (lbar * lbar);

  Vector y = p.set().project(x);
  double delta = std::numeric_limits<double>::infinity();
  for (std::int64_t it = 0; it < max_iter; ++it) {
    const Vector g = mean_field(p, x, y, mode);
    Vector next = p.set().project(y - step * g);
    delta = (next - y).norm();
    y = std::move(next);
    // The iteration contracts, so an increment <= tol certifies the
    // fixed-point residual of the returned point at the same tolerance.
    if (delta <= tol) return y;
  }
  throw NonConvergence("inner VI solver exceeded its iteration cap", delta);
}

EquilibriumReport find_fixed_point(const std::function<Vector(const Vector&)>& sol,
                                   const Problem& p, const Vector& x_init,
                                   const EquilibriumOptions& opts) {
  const double q = p.contraction_modulus();
  if (!(q < 1.0)) throw InvalidArgument("fixed-point iteration requires gamma*beta < alpha");
  const double threshold = q > 0.0
                               ? opts.outer_tol * (1.0 - q) / q
                               : std::numeric_limits<double>::infinity();
  const bool allow_noise_floor = is_monte_carlo(opts.mode);

  EquilibriumReport report;
  report.inner_tolerance = opts.inner_tol;
  report.outer_tolerance = opts.outer_tol;

  Vector x = x_init;
  std::vector<double> ratios;
  std::vector<double> deltas;
  double prev_delta = -1.0;
  int consecutive_expansions = 0;

  for (std::int64_t k = 1; k <= opts.max_outer; ++k) {
    Vector next = sol(x);
    const double delta = (next - x).norm();
    x = std::move(next);
    report.outer_iterations = k;
    deltas.push_back(delta);

    if (prev_delta > 0.0) {
      const double ratio = delta / prev_delta;
      ratios.push_back(ratio);
      consecutive_expansions = ratio >= 1.0 ? consecutive_expansions + 1 : 0;
      if (consecutive_expansions >= 5)
        throw ContractionViolation(
            "solution map expanded over 5 consecutive outer iterations; "
            "the contraction assumption appears violated");
    }
    prev_delta = delta;

    if (delta == 0.0 || delta <= threshold) {
      report.x_star = x;
      report.observed_contraction_ratio = median(ratios);
      report.noise_floor = allow_noise_floor ? delta : 0.0;
      return report;
    }

    // Under Monte-Carlo expectations the increments bottom out at the
    // sampling noise; detect the plateau and report it as the floor.
    if (allow_noise_floor && k >= 16) {
      const auto last = deltas.end();
      const double recent = *std::min_element(last - 8, last);
      const double older = *std::min_element(last - 16, last - 8);
      if (recent >= 0.8 * older) {
        report.x_star = x;
        report.observed_contraction_ratio = median(ratios);
        report.noise_floor = recent;
        return report;
      }
    }
  }
  throw NonConvergence("outer fixed-point iteration exceeded its cap", prev_delta);
}

EquilibriumReport find_equilibrium(const Problem& p, const Vector& x_init,
                                   const EquilibriumOptions& opts) {
  if (static_cast<int>(x_init.size()) != p.dimension())
    throw InvalidArgument("find_equilibrium: initial point dimension mismatch");

  auto sol = [&](const Vector& x) {
    return solve_inner_vi(p, x, opts.inner_tol, opts.mode, opts.max_inner);
  };
  EquilibriumReport report = find_fixed_point(sol, p, p.set().project(x_init), opts);

  // Refine until the natural-map residual also certifies the point, so the
  // reported residual obeys the outer tolerance contract.
  for (int extra = 0; extra < 64; ++extra) {
    report.residual_norm = natural_residual(p, report.x_star, opts.mode);
    if (report.residual_norm <= opts.outer_tol ||
        (report.noise_floor > 0.0 && report.residual_norm <= 4.0 * report.noise_floor))
      break;
    report.x_star = sol(report.x_star);
    ++report.outer_iterations;
  }
  report.interior =
      p.set().interior_distance(report.x_star) > 1e-10 * (1.0 + report.x_star.norm());
  return report;
}

AssumptionAudit audit_assumptions(const Problem& p, const Vector& x_star, double probe_radius,
                                  std::int64_t probes, std::uint64_t seed,
                                  std::int64_t mc_samples_per_probe) {
  if (probes < 2) throw InvalidArgument("audit_assumptions requires probes >= 2");
  if (!(probe_radius > 0.0)) throw InvalidArgument("probe radius must be positive");

  const int d = p.dimension();
  const bool analytic_mean = p.decision().is_affine() && p.dist().has_analytic_mean();

  AssumptionAudit audit;
  audit.probe_count = probes;
  audit.alpha_estimate = std::numeric_limits<double>::infinity();

  auto field = [&](const Vector& x, const Vector& y, std::uint64_t probe_seed) {
    if (analytic_mean) return mean_field(p, x, y, Analytic{});
    return mean_field(p, x, y, MonteCarloMode{mc_samples_per_probe, probe_seed, 1});
  };

  for (std::int64_t i = 0; i < probes; ++i) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    auto draw_point = [&] {
      Vector g(d);
      rng.fill_standard_normal(g);
      // probe 0 sits exactly at x_star, the binding point of the K bound
      return i == 0 ? x_star : Vector(p.set().project(x_star + probe_radius * g));
    };
    const Vector x = draw_point();
    Vector y(d), yp(d);
    rng.fill_standard_normal(y);
    rng.fill_standard_normal(yp);
    y = p.set().project(x_star + probe_radius * y);
    yp = p.set().project(x_star + probe_radius * yp);

    if ((y - yp).norm() > 1e-12) {
      const Vector gy = field(x, y, splitmix64_at(rng.seed(), 1));
      const Vector gyp = field(x, yp, splitmix64_at(rng.seed(), 2));
      const double quot = (gy - gyp).dot(y - yp) / (y - yp).squaredNorm();
      audit.alpha_estimate = std::min(audit.alpha_estimate, quot);
    }

    const Vector z = p.dist().sample(x, rng);
    const Vector zp = p.dist().sample(x, rng);
    if ((z - zp).norm() > 1e-12) {
      const double quot =
          (p.decision().eval(x, z) - p.decision().eval(x, zp)).norm() / (z - zp).norm();
      audit.beta_estimate = std::max(audit.beta_estimate, quot);
    }

    // K probe: E||xi_x||^2 / (1 + ||x - x*||^2) with xi = G(x,z) - G_x(x).
    const Vector gxx = field(x, x, splitmix64_at(rng.seed(), 3));
    double second_moment = 0.0;
    RandomStream krng = RandomStream::substream(rng.seed(), 4);
    for (std::int64_t s = 0; s < mc_samples_per_probe; ++s) {
      const Vector zs = p.dist().sample(x, krng);
      second_moment += (p.decision().eval(x, zs) - gxx).squaredNorm();
    }
    second_moment /= static_cast<double>(mc_samples_per_probe);
    audit.variance_bound_estimate = std::max(
        audit.variance_bound_estimate, second_moment / (1.0 + (x - x_star).squaredNorm()));
  }

  if (!p.dist().is_custom()) {
    audit.gamma_estimate = p.dist().wasserstein_lipschitz();
  } else {
    // Mean-shift lower bound; a heuristic, not a Wasserstein certificate.
    audit.gamma_is_heuristic = true;
    for (std::int64_t i = 0; i < probes; ++i) {
      RandomStream rng = RandomStream::substream(seed ^ 0x5ca1ab1eULL, static_cast<std::uint64_t>(i));
      Vector x(d), xp(d);
      rng.fill_standard_normal(x);
      rng.fill_standard_normal(xp);
      x = p.set().project(x_star + probe_radius * x);
      xp = p.set().project(x_star + probe_radius * xp);
      if ((x - xp).norm() <= 1e-12) continue;
      Vector mx, mxp;
      if (p.dist().has_analytic_mean()) {
        mx = p.dist().mean(x);
        mxp = p.dist().mean(xp);
      } else {
        mx = Vector::Zero(p.data_dimension());
        mxp = Vector::Zero(p.data_dimension());
        RandomStream mrng = RandomStream::substream(rng.seed(), 1);
        RandomStream mrng2 = RandomStream::substream(rng.seed(), 1);
        for (std::int64_t s = 0; s < mc_samples_per_probe; ++s) {
          mx += p.dist().sample(x, mrng);
          mxp += p.dist().sample(xp, mrng2);
        }
        mx /= static_cast<double>(mc_samples_per_probe);
        mxp /= static_cast<double>(mc_samples_per_probe);
      }
      audit.gamma_estimate = std::max(audit.gamma_estimate, (mx - mxp).norm() / (x - xp).norm());
    }
  }
  return audit;
}

}  // namespace ddsa
