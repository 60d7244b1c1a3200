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
#include <vector>

#include "ddsa/equilibrium.hpp"
#include "ddsa/problem.hpp"
#include "ddsa/schedule.hpp"

namespace ddsa {

// Tilted-distribution machinery: reweight D(x) by (1 + h(u^T g_x(z))) / C_x^u
// with a bounded odd saturation h and a mean-zero map g. Everything here is
// built from that density ratio: exact tilted sampling by rejection,
// perturbed equilibria, the trajectory log-likelihood-ratio statistic, and
// local f-divergence estimates.

/// Odd C^3 saturation: identity on [-1/2, 1/2], a polynomial blend on
/// [1/2, 3/2] matching value and three derivatives at both knots, constant 1
/// beyond. Coefficients are hard-coded; scripts/regen_saturation_coeffs.py
/// re-derives them from the boundary conditions.
class SaturationFunction {
 public:
  static SaturationFunction c3_blend();
  /// Pass-through h(t) = t. Not bounded; only valid where the identity
  /// region applies (bounded-support test families).
  static SaturationFunction identity();

  double value(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  double d3(double t) const;

  bool is_identity() const { return identity_; }
  double linear_half_width() const { return 0.5; }
  double blend_end() const { return 1.5; }
  double saturation_level() const { return 1.0; }
  /// Blend polynomial coefficients in tau = t - 1/2, ascending order.
  const std::vector<double>& blend_coefficients() const;

 private:
  explicit SaturationFunction(bool identity) : identity_(identity) {}
  bool identity_ = false;
};

struct TiltSpec {
  enum class MapKind { CanonicalNoise, Custom };

  Vector direction;  // u
  SaturationFunction saturation = SaturationFunction::c3_blend();
  MapKind map_kind = MapKind::CanonicalNoise;
  /// Required for MapKind::Custom: a mean-zero map g(x, z).
  std::function<Vector(const Vector& x, const Vector& z)> custom_map;

  static TiltSpec canonical(Vector direction);
  TiltSpec with_direction(Vector direction) const;
};

/// g_x(z): the canonical noise G(x,z) - G_x(x) (analytic mean field) or the
/// custom handle.
Vector tilt_g(const Problem& p, const TiltSpec& tilt, const Vector& x, const Vector& z);

/// Normalizer C_x^u = 1 + E h(u^T g_x(z)), estimated over `samples` draws.
/// Always within [0, 2].
double normalizer(const Problem& p, const TiltSpec& tilt, const Vector& x, std::int64_t samples,
                  std::uint64_t seed);

/// One draw from the tilted distribution by rejection against the base
/// sampler: accept z with probability (1 + h(u^T g_x(z))) / 2. Expected
/// proposals per accept is 2 / C_x^u; aborts after 10^6 proposals.
Vector sample_tilted(const Problem& p, const TiltSpec& tilt, const Vector& x, RandomStream& rng,
                     std::int64_t* proposals = nullptr);

struct TiltedEquilibriumOptions {
  EquilibriumOptions outer;
  /// Samples per solution-map evaluation; the same seed is reused for every
  /// outer iteration (common random numbers), so the iteration converges to
  /// the equilibrium of one fixed empirical problem.
  std::int64_t samples = 1000000;
  std::uint64_t seed = 0;
};

/// Equilibrium of the tilted problem, via the Banach iteration against
/// importance-weighted mean fields under common random numbers.
EquilibriumReport perturbed_equilibrium(const Problem& p, const TiltSpec& tilt, const Vector& u,
                                        const Vector& x_init, const TiltedEquilibriumOptions& opts);

/// Cross moment Sigma_{g,G} = E[g_{x*}(z) G(x*,z)^T]; analytic for the
/// canonical tilt on built-in families.
Matrix sigma_cross(const Problem& p, const TiltSpec& tilt, const Vector& x_star,
                   std::int64_t samples = 0, std::uint64_t seed = 0);

struct ShiftRow {
  double u_norm = 0.0;
  Vector u;
  Vector x_star_u;
  /// ||x*_u - x*_0 + W^-1 Sigma_{g,G}^T u|| / ||u||; 0 by convention at u = 0.
  double ratio = 0.0;
};

struct ShiftTable {
  std::vector<ShiftRow> rows;     // in the caller's order of u norms
  Vector x_star_base;             // CRN solve at u = 0, the reference point
  Matrix w;
  Matrix sigma_cross;
  /// Spread of the smallest-u solve under a reseeded replay, divided by
  /// ||u||: the Monte-Carlo floor the ratios bottom out at.
  double noise_floor = 0.0;
};

/// First-order expansion check of u -> x*_u along a shrinking sequence of
/// tilt magnitudes. All solves share common random numbers so the ratio
/// isolates the expansion error from the sampling noise.
ShiftTable equilibrium_shift_check(const Problem& p, const TiltSpec& tilt,
                                   const std::vector<double>& u_norms, const Vector& u_direction,
                                   const Vector& x_init, const TiltedEquilibriumOptions& opts);

struct LanOptions {
  std::int64_t normalizer_samples = 10000;
  double cache_grid = 1e-3;       // iterate quantization for the normalizer cache
  std::int64_t normalizer_budget = 200000;  // max cached cells before falling back
  int workers = 1;
};

struct LanReport {
  std::int64_t k = 0;
  std::int64_t replicas = 0;
  Matrix z_samples;   // per-replica Z_k rows
  Vector log_lr;      // per-replica log dQ_{k,u}/dQ_{k,0}
  Matrix sigma_g;     // pooled covariance of the per-step g values
  Matrix zk_covariance;
  double predicted_mean = 0.0;      // -1/2 u^T Sigma_g u from the pooled estimate
  double predicted_variance = 0.0;  // u^T Sigma_g u
  double observed_mean = 0.0;
  double observed_variance = 0.0;
  double se_mean = 0.0;      // includes the widening from normalizer fallbacks
  double se_variance = 0.0;
  std::int64_t normalizer_cells = 0;
  std::int64_t normalizer_fallbacks = 0;
};

/// Local-asymptotic-normality probe: runs `replicas` base-law SFB
/// trajectories of length k, accumulating Z_k = k^{-1/2} sum_j g(x_j, z_j)
/// and the exact log-likelihood ratio between the u/sqrt(k)-tilted and base
/// trajectory laws. Normalizers along the trajectory are Monte-Carlo
/// estimates cached per quantized iterate with a seed derived from the cell,
/// so duplicate computation is idempotent.
LanReport lan_statistic(const Problem& p, const TiltSpec& tilt, const Vector& u, std::int64_t k,
                        const StepSchedule& schedule, const Vector& x0, std::int64_t replicas,
                        std::uint64_t master_seed, const LanOptions& opts = {});

enum class FDivergenceKind { KullbackLeibler, ChiSquared };

struct FDivergenceEstimate {
  double value = 0.0;
  double prediction = 0.0;  // f''(1)/2 * u^T Sigma_g u from the same draws
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Plug-in Monte-Carlo estimate of the f-divergence between the tilted and
/// base distributions at decision x, with the quadratic small-u prediction.
FDivergenceEstimate f_divergence_estimate(const Problem& p, const TiltSpec& tilt, const Vector& u,
                                          FDivergenceKind kind, const Vector& x,
                                          std::int64_t samples, std::uint64_t seed);

enum class LossKind { SquaredNorm, IndicatorOutsideBall };

struct RiskRow {
  Vector u;
  Vector x_star_u;
  double risk = 0.0;
  double std_error = 0.0;
};

struct MinimaxProbe {
  std::vector<RiskRow> rows;
  double max_risk = 0.0;
  double benchmark = 0.0;  // E loss(Z), Z ~ N(0, asymptotic covariance)
  double benchmark_std_error = 0.0;
  double max_risk_minus_benchmark = 0.0;
};

struct MinimaxOptions {
  std::int64_t replicas = 100;
  int workers = 1;
  std::int64_t benchmark_samples = 1000000;
  double indicator_radius = 0.0;  // for LossKind::IndicatorOutsideBall
  TiltedEquilibriumOptions equilibrium;
};

/// Empirical risk of the averaged SFB estimator on tilted problems across a
/// grid of u values (trajectories drawn through the tilted sampler), against
/// the Gaussian benchmark E[loss(Z)].
MinimaxProbe minimax_risk_probe(const Problem& p, const TiltSpec& tilt,
                                const std::vector<Vector>& u_grid, std::int64_t k,
                                const StepSchedule& schedule, const Vector& x0, LossKind loss,
                                const Matrix& asymptotic_cov, std::uint64_t master_seed,
                                const MinimaxOptions& opts);

std::string to_json(const LanReport& report);
std::string to_json(const ShiftTable& table);
/// Full serialization of a tilt, including the blend coefficients, for run
/// manifests.
std::string to_json(const TiltSpec& spec);

}  // namespace ddsa
