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
#pragma once

#include <string>
#include <variant>

#include "ddsa/equilibrium.hpp"
#include "ddsa/problem.hpp"

namespace ddsa {

// Asymptotic covariance of the averaged iterates: the noise second moment
// Sigma at equilibrium, the Jacobian W of the mean map R split into its
// static and dynamic parts, and the product W^-1 Sigma W^-T.

/// R(x) = G_x(x), the mean map whose root is the equilibrium.
Vector mean_map(const Problem& p, const Vector& x, const ExpectationMode& mode);

struct SigmaAnalytic {};
struct SigmaMonteCarlo {
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
  int workers = 1;
};
using SigmaMode = std::variant<SigmaAnalytic, SigmaMonteCarlo>;

/// Sigma = E_{z~D(x*)}[G(x*,z) G(x*,z)^T], symmetrized; in Monte-Carlo mode
/// requires at least d+1 samples.
Matrix estimate_sigma(const Problem& p, const Vector& x_star, const SigmaMode& mode);

struct WAnalytic {};
struct WCentralDifference {
  /// Step h; when <= 0, defaults to 1e-4 * (1 + ||x*||).
  double h = 0.0;
  ExpectationMode expectation = Analytic{};
};
using WMode = std::variant<WAnalytic, WCentralDifference>;

struct WParts {
  Matrix w_static;   // Jacobian of y -> G_{x*}(y) at x*
  Matrix w_dynamic;  // Jacobian of y -> G_y(x*) at x*
  Matrix w;          // sum
};

/// The two Jacobian parts of W = dR(x*), via closed forms for built-ins or
/// central differences of the frozen-argument mean fields. Monte-Carlo
/// expectations reuse the same seed on both sides of each difference, so the
/// sampling noise cancels. Requires an interior x*.
WParts estimate_w(const Problem& p, const Vector& x_star, const WMode& mode, bool interior = true);

/// W^-1 Sigma W^-T via linear solves (no explicit inverse), symmetrized.
Matrix asymptotic_covariance(const Matrix& sigma, const Matrix& w);

struct PositivityCheck {
  bool ok = false;
  double lambda_min = 0.0;
  double margin = 0.0;  // lambda_min - (alpha - gamma*beta)
};

/// Checks lambda_min((W + W^T)/2) >= alpha - gamma*beta - 1e-6.
PositivityCheck jacobian_positivity_check(const Matrix& w, double alpha, double gamma, double beta);

struct Provenance {
  std::string mode;  // "analytic" | "central-difference" | "monte-carlo"
  double fd_step = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

struct CovarianceReport {
  Matrix sigma;
  Matrix w_static;
  Matrix w_dynamic;
  Matrix w;
  Matrix asymptotic;
  double min_real_eigenpart_w = 0.0;
  double sigma_eigenvalue_floor = 0.0;
  double w_condition = 0.0;
  bool ill_conditioned = false;  // condition number above 1e12; flagged, not fatal
  Provenance sigma_provenance;
  Provenance w_provenance;
};

/// Assembles the full report at a solved equilibrium.
CovarianceReport covariance_report(const Problem& p, const EquilibriumReport& equilibrium,
                                   const SigmaMode& sigma_mode = SigmaAnalytic{},
                                   const WMode& w_mode = WAnalytic{});

std::string to_json(const CovarianceReport& report);

}  // namespace ddsa
