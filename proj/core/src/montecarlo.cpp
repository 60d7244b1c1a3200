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
#include "ddsa/montecarlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numbers>

#include "ddsa/errors.hpp"
#include "ddsa/parallel.hpp"

namespace ddsa {

ReplicaBatch run_replicas(const Problem& p, const Vector& x0, const StepSchedule& schedule,
                          std::int64_t horizon, std::int64_t replicas, std::uint64_t master_seed,
                          const Vector& x_star, const std::vector<std::int64_t>& checkpoints,
                          int workers) {
  if (replicas < 2) throw InvalidArgument("run_replicas requires at least 2 replicas");
  if (static_cast<int>(x_star.size()) != p.dimension())
    throw InvalidArgument("run_replicas: x* dimension mismatch");

  const int d = p.dimension();
  ReplicaBatch batch;
  batch.problem_id = p.id_hash();
  batch.horizon = horizon;
  batch.replicas = replicas;
  batch.master_seed = master_seed;
  batch.x_star = x_star;
  batch.deviations.resize(replicas, d);
  batch.checkpoint_ts = checkpoints;
  std::sort(batch.checkpoint_ts.begin(), batch.checkpoint_ts.end());
  for (std::size_t c = 0; c < batch.checkpoint_ts.size(); ++c) {
    batch.checkpoint_deviations.emplace_back(replicas, d);
    batch.checkpoint_sq_dist.emplace_back(replicas);
  }

  RecordPlan plan;
  plan.checkpoints = batch.checkpoint_ts;

  parallel_for(replicas, workers, [&](std::int64_t i) {
    RandomStream rng = RandomStream::substream(master_seed, static_cast<std::uint64_t>(i));
    Trajectory traj;
    try {
      traj = run_sfb_observed(p, x0, schedule, horizon, rng, plan,
                              [](std::int64_t, const Vector&, const Vector&, const Vector&) {});
    } catch (const NumericalFailure& failure) {
      throw NumericalFailure("replica " + std::to_string(i) + " (seed " +
                                 std::to_string(rng.seed()) + ") failed: " + failure.what(),
                             failure.step());
    }
    batch.deviations.row(i) =
        std::sqrt(static_cast<double>(horizon)) * (traj.final_xbar - x_star).transpose();
    for (std::size_t c = 0; c < traj.checkpoints.size(); ++c) {
      const auto& cp = traj.checkpoints[c];
      batch.checkpoint_deviations[c].row(i) =
          std::sqrt(static_cast<double>(cp.t)) * (cp.xbar - x_star).transpose();
      batch.checkpoint_sq_dist[c](i) = (cp.x - x_star).squaredNorm();
    }
  });
  return batch;
}

ReplicaBatch synthetic_gaussian_batch(const Matrix& cov, std::int64_t rows, std::uint64_t seed) {
  if (rows < 1) throw InvalidArgument("synthetic batch requires at least one row");
  const int d = static_cast<int>(cov.rows());
  const Matrix root = symmetric_sqrt(cov);
  ReplicaBatch batch;
  batch.problem_id = fnv1a("synthetic-gaussian");
  batch.horizon = 0;
  batch.replicas = rows;
  batch.master_seed = seed;
  batch.x_star = Vector::Zero(d);
  batch.deviations.resize(rows, d);
  for (std::int64_t i = 0; i < rows; ++i) {
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
    Vector w(d);
    rng.fill_standard_normal(w);
    batch.deviations.row(i) = (root * w).transpose();
  }
  return batch;
}

double chi_square_quantile(double level, int dof) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("chi-square level must be in (0,1)");
  if (dof < 1) throw InvalidArgument("chi-square dof must be >= 1");
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, level);
}

NormalityReport normality_check(const ReplicaBatch& batch, const Matrix& target_covariance) {
  const int d = static_cast<int>(batch.deviations.cols());
  const std::int64_t rows = batch.deviations.rows();
  if (rows < d + 1)
    throw InsufficientSamples("normality_check needs more rows than the dimension");
  if (target_covariance.rows() != d || target_covariance.cols() != d)
    throw InvalidArgument("normality_check: target covariance shape mismatch");

  Eigen::LLT<Matrix> llt(target_covariance);
  if (llt.info() != Eigen::Success)
    throw SingularJacobian("normality_check: target covariance is not positive definite");

  NormalityReport report;
  report.rows = rows;
  report.target_covariance = target_covariance;

  const Vector mean = batch.deviations.colwise().mean();
  report.mean_deviation_norm = mean.norm();
  const Matrix centered = batch.deviations.rowwise() - mean.transpose();
  report.empirical_covariance =
      (centered.transpose() * centered) / static_cast<double>(rows - 1);
  report.relative_operator_error =
      operator_norm(report.empirical_covariance - target_covariance) /
      operator_norm(target_covariance);

  // Coverage counts use the raw (uncentered) deviations against the target
  // law; that is the confidence-region statement being certified.
  for (double level : coverage_levels()) {
    const double q = chi_square_quantile(level, d);
    std::int64_t inside = 0;
    for (std::int64_t i = 0; i < rows; ++i) {
      const Vector v = batch.deviations.row(i).transpose();
      const double m2 = v.dot(llt.solve(v));
      if (m2 <= q) ++inside;
    }
    report.coverage[level] = static_cast<double>(inside) / static_cast<double>(rows);
  }
  return report;
}

RateFit rate_fit(const ReplicaBatch& batch, const StepSchedule& schedule) {
  if (batch.checkpoint_ts.size() < 3)
    throw InsufficientCheckpoints("rate_fit requires at least 3 checkpoints");
  if (batch.replicas < 30)
    throw InsufficientSamples("rate_fit requires at least 30 replicas per checkpoint");

  RateFit fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(batch.checkpoint_ts.size());
  for (std::size_t c = 0; c < batch.checkpoint_ts.size(); ++c) {
    RatePoint pt;
    pt.t = batch.checkpoint_ts[c];
    pt.eta = schedule.eta(pt.t);
    pt.mean_sq_dist = batch.checkpoint_sq_dist[c].mean();
    fit.points.push_back(pt);
    const double lx = std::log(pt.eta);
    const double ly = std::log(pt.mean_sq_dist);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("rate_fit: checkpoints give identical step sizes");
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.implied_constant = std::exp(fit.intercept);
  return fit;
}

DensityGrid density_grid(const Matrix& rows, const std::vector<int>& components,
                         std::optional<double> bandwidth, int grid_points) {
  if (rows.rows() < 1) throw InvalidArgument("density_grid requires a nonempty batch");
  if (components.empty() || components.size() > 2)
    throw InvalidArgument("density_grid takes one component (margin) or two (pair)");
  for (int c : components)
    if (c < 0 || c >= rows.cols()) throw InvalidArgument("density_grid component out of range");
  if (bandwidth.has_value() && !(*bandwidth > 0.0))
    throw InvalidArgument("density_grid bandwidth must be positive");
  if (grid_points < 2) throw InvalidArgument("density_grid needs at least 2 grid points");

  const std::int64_t n = rows.rows();
  const int dplot = static_cast<int>(components.size());
  const double scott = std::pow(static_cast<double>(n), -1.0 / (dplot + 4));

  auto axis_setup = [&](int comp, double& bw, std::vector<double>& grid) {
    const Vector col = rows.col(comp);
    const double mean = col.mean();
    double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1))
                      : 0.0;
    bw = bandwidth.value_or(scott * sd);
    if (!(bw > 0.0)) bw = std::max(1e-3, 1e-3 * std::abs(mean));  // degenerate column
    const double lo = col.minCoeff() - 3.0 * bw;
    const double hi = col.maxCoeff() + 3.0 * bw;
    grid.resize(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
      grid[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (grid_points - 1);
  };

  DensityGrid out;
  if (dplot == 1) {
    axis_setup(components[0], out.bandwidth_x, out.xs);
    out.density.resize(1, grid_points);
    const double norm = 1.0 / (static_cast<double>(n) * out.bandwidth_x *
                               std::sqrt(2.0 * std::numbers::pi));
    for (int i = 0; i < grid_points; ++i) {
      double acc = 0.0;
      for (std::int64_t r = 0; r < n; ++r) {
        const double u = (out.xs[static_cast<std::size_t>(i)] - rows(r, components[0])) /
                         out.bandwidth_x;
        acc += std::exp(-0.5 * u * u);
      }
      out.density(0, i) = norm * acc;
    }
    return out;
  }

  axis_setup(components[0], out.bandwidth_x, out.xs);
  axis_setup(components[1], out.bandwidth_y, out.ys);
  out.density.resize(grid_points, grid_points);
  const double norm = 1.0 / (static_cast<double>(n) * 2.0 * std::numbers::pi * out.bandwidth_x *
                             out.bandwidth_y);
  for (int iy = 0; iy < grid_points; ++iy) {
    for (int ix = 0; ix < grid_points; ++ix) {
      double acc = 0.0;
      for (std::int64_t r = 0; r < n; ++r) {
        const double ux = (out.xs[static_cast<std::size_t>(ix)] - rows(r, components[0])) /
                          out.bandwidth_x;
        const double uy = (out.ys[static_cast<std::size_t>(iy)] - rows(r, components[1])) /
                          out.bandwidth_y;
        acc += std::exp(-0.5 * (ux * ux + uy * uy));
      }
      out.density(iy, ix) = norm * acc;
    }
  }
  return out;
}

Matrix ellipse_boundary(const Matrix& cov, double level, int points) {
  if (cov.rows() != 2 || cov.cols() != 2)
    throw InvalidArgument("ellipse_boundary is defined for 2-d covariances");
  if (points < 3) throw InvalidArgument("ellipse_boundary needs at least 3 points");
  const double q = chi_square_quantile(level, 2);
  const Matrix root = symmetric_sqrt(cov);
  Matrix boundary(points, 2);
  for (int i = 0; i < points; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / (points - 1);
    Vector unit(2);
    unit << std::cos(theta), std::sin(theta);
    boundary.row(i) = (std::sqrt(q) * (root * unit)).transpose();
  }
  return boundary;
}

}  // namespace ddsa
