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
#include "ddsa/covariance.hpp"

#include <cmath>

#include "ddsa/errors.hpp"
#include "ddsa/parallel.hpp"

namespace ddsa {

Vector mean_map(const Problem& p, const Vector& x, const ExpectationMode& mode) {
  return mean_field(p, x, x, mode);
}

Matrix estimate_sigma(const Problem& p, const Vector& x_star, const SigmaMode& mode) {
  const int d = p.dimension();
  if (static_cast<int>(x_star.size()) != d)
    throw InvalidArgument("estimate_sigma: x* dimension mismatch");

  if (std::holds_alternative<SigmaAnalytic>(mode)) {
    if (!p.decision().is_affine() || !p.dist().has_analytic_mean() || p.dist().is_custom())
      throw UnsupportedMode("analytic Sigma requires a built-in family");
    // G(x*, z) = mu + Jz (z - m(x*)) with mu = G_{x*}(x*), so the second
    // moment is Jz Cov Jz^T + mu mu^T; at an interior equilibrium mu = 0.
    const Matrix& jz = p.decision().z_jacobian();
    const Vector mu = mean_field(p, x_star, x_star, Analytic{});
    Matrix sigma = jz * p.dist().noise_covariance() * jz.transpose() + mu * mu.transpose();
    return 0.5 * (sigma + sigma.transpose());
  }

  const auto& mc = std::get<SigmaMonteCarlo>(mode);
  if (mc.samples < d + 1)
    throw InsufficientSamples("estimate_sigma needs at least d+1 Monte-Carlo samples");

  // Accumulate the upper triangle as a flattened vector so the chunked mean
  // machinery (and its determinism contract) applies unchanged.
  const int packed = d * (d + 1) / 2;
  const Vector flat = chunked_mc_mean(
      mc.samples, mc.seed, mc.workers, packed,
      [&](RandomStream& rng, std::int64_t count, Vector& sum) {
        for (std::int64_t i = 0; i < count; ++i) {
          const Vector g = p.decision().eval(x_star, p.dist().sample(x_star, rng));
          int k = 0;
          for (int r = 0; r < d; ++r)
            for (int c = r; c < d; ++c) sum(k++) += g(r) * g(c);
        }
      });
  Matrix sigma(d, d);
  int k = 0;
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) {
      sigma(r, c) = flat(k);
      sigma(c, r) = flat(k);
      ++k;
    }
  return sigma;
}

WParts estimate_w(const Problem& p, const Vector& x_star, const WMode& mode, bool interior) {
  const int d = p.dimension();
  if (static_cast<int>(x_star.size()) != d) throw InvalidArgument("estimate_w: x* dimension mismatch");
  if (!interior)
    throw UnsupportedMode("estimate_w requires an interior equilibrium; the Jacobian "
                          "formula does not apply on the boundary");

  WParts parts;
  if (std::holds_alternative<WAnalytic>(mode)) {
    if (!p.decision().is_affine() || !p.dist().has_analytic_mean() || p.dist().is_custom())
      throw UnsupportedMode("analytic W requires a built-in family");
    parts.w_static = p.decision().x_jacobian();
    parts.w_dynamic = p.decision().z_jacobian() * p.dist().mean_jacobian();
    parts.w = parts.w_static + parts.w_dynamic;
    return parts;
  }

  const auto& fd = std::get<WCentralDifference>(mode);
  const double h = fd.h > 0.0 ? fd.h : 1e-4 * (1.0 + x_star.norm());

  parts.w_static = Matrix::Zero(d, d);
  parts.w_dynamic = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    Vector e = Vector::Zero(d);
    e(j) = h;
    // static: perturb the evaluation point of the frozen-distribution field;
    // dynamic: perturb the distribution index. Expectation seeds are shared
    // across the +/- evaluations (common random numbers).
    const Vector s_plus = mean_field(p, x_star, x_star + e, fd.expectation);
    const Vector s_minus = mean_field(p, x_star, x_star - e, fd.expectation);
    parts.w_static.col(j) = (s_plus - s_minus) / (2.0 * h);
    const Vector d_plus = mean_field(p, x_star + e, x_star, fd.expectation);
    const Vector d_minus = mean_field(p, x_star - e, x_star, fd.expectation);
    parts.w_dynamic.col(j) = (d_plus - d_minus) / (2.0 * h);
  }
  parts.w = parts.w_static + parts.w_dynamic;
  return parts;
}

Matrix asymptotic_covariance(const Matrix& sigma, const Matrix& w) {
  if (sigma.rows() != sigma.cols() || w.rows() != w.cols() || sigma.rows() != w.rows())
    throw InvalidArgument("asymptotic_covariance: shape mismatch");
  Eigen::FullPivLU<Matrix> lu(w);
  if (!lu.isInvertible())
    throw SingularJacobian("W is singular; the asymptotic covariance is undefined");
  const Matrix winv_sigma = lu.solve(sigma);                      // W^-1 Sigma
  const Matrix result = lu.solve(winv_sigma.transpose()).transpose();  // (W^-1 Sigma) W^-T
  return 0.5 * (result + result.transpose());
}

PositivityCheck jacobian_positivity_check(const Matrix& w, double alpha, double gamma,
                                          double beta) {
  PositivityCheck check;
  check.lambda_min = min_symmetric_eigenvalue(w);
  const double bound = alpha - gamma * beta;
  check.margin = check.lambda_min - bound;
  check.ok = check.lambda_min >= bound - 1e-6;
  return check;
}

CovarianceReport covariance_report(const Problem& p, const EquilibriumReport& equilibrium,
                                   const SigmaMode& sigma_mode, const WMode& w_mode) {
  CovarianceReport report;

  Matrix raw_sigma = estimate_sigma(p, equilibrium.x_star, sigma_mode);
  report.sigma = project_psd(raw_sigma, &report.sigma_eigenvalue_floor);

  const WParts parts = estimate_w(p, equilibrium.x_star, w_mode, equilibrium.interior);
  report.w_static = parts.w_static;
  report.w_dynamic = parts.w_dynamic;
  report.w = parts.w;
  report.min_real_eigenpart_w = min_real_eigenvalue_part(parts.w);
  report.w_condition = condition_number(parts.w);
  report.ill_conditioned = !(report.w_condition < 1e12);
  report.asymptotic = asymptotic_covariance(report.sigma, report.w);

  if (std::holds_alternative<SigmaAnalytic>(sigma_mode)) {
    report.sigma_provenance = {"analytic", 0.0, 0, 0};
  } else {
    const auto& mc = std::get<SigmaMonteCarlo>(sigma_mode);
    report.sigma_provenance = {"monte-carlo", 0.0, mc.samples, mc.seed};
  }
  if (std::holds_alternative<WAnalytic>(w_mode)) {
    report.w_provenance = {"analytic", 0.0, 0, 0};
  } else {
    const auto& fd = std::get<WCentralDifference>(w_mode);
    const double h = fd.h > 0.0 ? fd.h : 1e-4 * (1.0 + equilibrium.x_star.norm());
    Provenance prov{"central-difference", h, 0, 0};
    if (const auto* mc = std::get_if<MonteCarloMode>(&fd.expectation)) {
      prov.samples = mc->samples;
      prov.seed = mc->seed;
    }
    report.w_provenance = prov;
  }
  return report;
}

}  // namespace ddsa
