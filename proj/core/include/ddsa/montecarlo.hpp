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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddsa/covariance.hpp"
#include "ddsa/sfb.hpp"

namespace ddsa {

// Replicated-trajectory harness for checking the averaged-iterate central
// limit behavior: collect sqrt(t)(xbar_t - x*) across independent replicas
// and compare their law against the predicted Gaussian.

struct ReplicaBatch {
  std::uint64_t problem_id = 0;
  std::int64_t horizon = 0;
  std::int64_t replicas = 0;
  std::uint64_t master_seed = 0;
  Vector x_star;
  /// Rows of sqrt(T)(xbar_T - x*), indexed by replica id.
  Matrix deviations;
  std::vector<std::int64_t> checkpoint_ts;
  /// Per checkpoint t: rows of sqrt(t)(xbar_t - x*).
  std::vector<Matrix> checkpoint_deviations;
  /// Per checkpoint t: ||x_t - x*||^2 of the last iterate, one per replica.
  std::vector<Vector> checkpoint_sq_dist;
};

/// Runs `replicas` independent SFB trajectories. Replica i draws from
/// RandomStream::substream(master_seed, i) and writes row i of every output,
/// so results do not depend on worker count or completion order. A replica
/// failure aborts the batch with the failing replica id and seed.
ReplicaBatch run_replicas(const Problem& p, const Vector& x0, const StepSchedule& schedule,
                          std::int64_t horizon, std::int64_t replicas, std::uint64_t master_seed,
                          const Vector& x_star, const std::vector<std::int64_t>& checkpoints = {},
                          int workers = 1);

/// Rows drawn directly from N(0, cov): the known-truth path used to calibrate
/// thresholds for the statistics below before applying them to SFB output.
ReplicaBatch synthetic_gaussian_batch(const Matrix& cov, std::int64_t rows, std::uint64_t seed);

struct NormalityReport {
  Matrix empirical_covariance;  // centered at the sample mean
  Matrix target_covariance;
  double relative_operator_error = 0.0;  // ||C_hat - C|| / ||C||
  /// nominal level -> fraction of rows inside the target chi-square ellipsoid.
  std::map<double, double> coverage;
  double mean_deviation_norm = 0.0;
  std::int64_t rows = 0;
};

inline const std::vector<double>& coverage_levels() {
  static const std::vector<double> levels{0.5, 0.9, 0.95};
  return levels;
}

NormalityReport normality_check(const ReplicaBatch& batch, const Matrix& target_covariance);

struct RatePoint {
  std::int64_t t = 0;
  double eta = 0.0;
  double mean_sq_dist = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double implied_constant = 0.0;  // exp(intercept)
  std::vector<RatePoint> points;
};

/// Least-squares fit of log(mean ||x_t - x*||^2) against log eta_t over the
/// batch checkpoints. Requires >= 3 checkpoints and >= 30 replicas.
RateFit rate_fit(const ReplicaBatch& batch, const StepSchedule& schedule);

struct DensityGrid {
  std::vector<double> xs;
  std::vector<double> ys;  // empty for 1-d margins
  Matrix density;          // 1 x nx for 1-d, ny x nx for 2-d
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
};

/// Gaussian-kernel density of selected row components on a regular grid.
/// `components` holds one index (margin) or two (pair). Bandwidth defaults
/// to the Scott rule R^(-1/(dplot+4)) times the per-axis deviation; passing
/// an explicit bandwidth <= 0 is an error.
DensityGrid density_grid(const Matrix& rows, const std::vector<int>& components,
                         std::optional<double> bandwidth = std::nullopt, int grid_points = 121);

/// Chi-square quantile (inverse CDF) with `dof` degrees of freedom.
double chi_square_quantile(double level, int dof);

/// Boundary polyline of {v : v^T C^-1 v = chi2_quantile(level, 2)} for 2-d
/// targets, for plot emission.
Matrix ellipse_boundary(const Matrix& cov, double level, int points = 256);

std::string to_json(const NormalityReport& report);

}  // namespace ddsa
