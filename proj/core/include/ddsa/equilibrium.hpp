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

#include <cstdint>
#include <functional>
#include <string>

#include "ddsa/problem.hpp"

namespace ddsa {

// Equilibrium computation: the solution map Sol(x) (inner, strongly monotone
// VI at frozen distribution) iterated to its fixed point (outer, Banach).

struct EquilibriumOptions {
  double outer_tol = 1e-9;
  double inner_tol = 1e-12;
  std::int64_t max_outer = 100000;
  std::int64_t max_inner = 1000000;
  ExpectationMode mode = Analytic{};
};

struct EquilibriumReport {
  Vector x_star;
  std::int64_t outer_iterations = 0;
  double inner_tolerance = 0.0;
  double outer_tolerance = 0.0;
  /// Median of per-iteration increment ratios; NaN-free, 0 when the outer
  /// loop converged in a single step.
  double observed_contraction_ratio = 0.0;
  /// Natural-map residual ||x - proj(x - G_x(x))|| at the returned point.
  double residual_norm = 0.0;
  bool interior = false;
  /// Size of the last outer increment; the achievable accuracy floor under
  /// Monte-Carlo expectations (0 means the deterministic path converged).
  double noise_floor = 0.0;
};

/// Solves the strongly monotone inner VI: find y with
/// 0 in G_x(y) + N_X(y), by projected fixed-point iteration with the
/// auxiliary step alpha / L-bar^2. Deterministic given the expectation mode.
Vector solve_inner_vi(const Problem& p, const Vector& x, double tol, const ExpectationMode& mode,
                      std::int64_t max_iter = 1000000);

/// Banach iteration x <- Sol(x). Stops on the a-posteriori bound
/// ||x_{k+1} - x_k|| <= outer_tol * (1-q)/q with q = gamma*beta/alpha, which
/// guarantees ||x_k - x*|| <= outer_tol under the declared constants, and
/// additionally requires the natural-map residual to reach outer_tol.
EquilibriumReport find_equilibrium(const Problem& p, const Vector& x_init,
                                   const EquilibriumOptions& opts = {});

/// Same iteration against a caller-supplied solution map; used by the tilt
/// machinery where Sol is evaluated under a perturbed distribution.
EquilibriumReport find_fixed_point(const std::function<Vector(const Vector&)>& sol,
                                   const Problem& p, const Vector& x_init,
                                   const EquilibriumOptions& opts);

struct AssumptionAudit {
  double alpha_estimate = 0.0;    // infimum of monotonicity quotients
  double beta_estimate = 0.0;     // supremum of z-Lipschitz quotients
  double gamma_estimate = 0.0;    // analytic for built-ins, heuristic otherwise
  double variance_bound_estimate = 0.0;  // K: sup of E||xi||^2 / (1+||x-x*||^2)
  std::int64_t probe_count = 0;
  bool gamma_is_heuristic = false;
};

/// Numerical probes of the regularity constants around x_star. Estimates are
/// extrema over a seeded probe sequence: growing the probe count with the
/// same seed extends the sequence, so suprema never shrink and infima never
/// grow. Estimates are reported, not enforced.
AssumptionAudit audit_assumptions(const Problem& p, const Vector& x_star, double probe_radius,
                                  std::int64_t probes, std::uint64_t seed,
                                  std::int64_t mc_samples_per_probe = 10000);

std::string to_json(const EquilibriumReport& report);

}  // namespace ddsa
