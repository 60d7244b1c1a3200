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

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "ddsa/errors.hpp"
#include "ddsa/problem.hpp"
#include "ddsa/random.hpp"
#include "ddsa/schedule.hpp"

namespace ddsa {

// Stochastic forward-backward method: sample z ~ D(x), move against G(x, z),
// project back onto the feasible set. One sample per step, no minibatching.

struct StepResult {
  Vector next_x;
  Vector sample;
  /// Projection residual (pre-projection minus post-projection, scaled by
  /// 1/eta). Exactly zero when the projection did not clip.
  Vector residual;
};

StepResult sfb_step(const Problem& p, const Vector& x, double eta, RandomStream& rng);

struct RecordPlan {
  std::vector<std::int64_t> checkpoints;  // indices in [0, horizon], any order
  std::int64_t thin = 0;                  // 0: store no iterates; k: store every k-th
  std::int64_t burnin = 0;                // averaging starts at this step (0 = from x0,
                                          // matching the untruncated average)
};

struct TrajectoryCheckpoint {
  std::int64_t t = 0;
  Vector x;
  Vector xbar;
  double eta = 0.0;
};

struct Trajectory {
  std::int64_t steps = 0;
  std::uint64_t seed = 0;
  Vector final_x;
  Vector final_xbar;
  std::vector<TrajectoryCheckpoint> checkpoints;
  std::vector<std::pair<std::int64_t, Vector>> iterates;  // thinned, (t, x_t)
  std::int64_t clipped_steps = 0;
  std::int64_t clipped_steps_last_decile = 0;
};

/// Runs `horizon` SFB steps, maintaining the running average x̄_t (the mean
/// of x_0..x_{t-1}, updated incrementally) and recording checkpoints
/// (t, x_t, x̄_t). The observer sees every step: obs(t, x_t, z_t, G(x_t,z_t)).
template <class Observer>
Trajectory run_sfb_observed(const Problem& p, const Vector& x0, const StepSchedule& schedule,
                            std::int64_t horizon, RandomStream& rng, const RecordPlan& plan,
                            Observer&& obs) {
  if (horizon < 1) throw InvalidArgument("run_sfb requires horizon >= 1");
  if (!p.set().contains(x0, 1e-12 * (1.0 + x0.norm())))
    throw InvalidArgument("run_sfb requires a feasible initial point");
  if (plan.burnin < 0 || plan.burnin >= horizon)
    throw InvalidArgument("burn-in must lie in [0, horizon)");

  std::vector<std::int64_t> marks = plan.checkpoints;
  std::sort(marks.begin(), marks.end());
  std::size_t next_mark = 0;

  Trajectory traj;
  traj.steps = horizon;
  traj.seed = rng.seed();

  Vector x = x0;
  Vector xbar = x0;  // convention: x̄_0 = x_0; overwritten by the first update
  std::int64_t averaged = 0;
  const std::int64_t decile_start = horizon - horizon / 10;

  for (std::int64_t t = 0; t <= horizon; ++t) {
    while (next_mark < marks.size() && marks[next_mark] == t) {
      traj.checkpoints.push_back({t, x, xbar, schedule.eta(t)});
      ++next_mark;
    }
    if (plan.thin > 0 && (t % plan.thin == 0 || t == horizon))
      traj.iterates.emplace_back(t, x);
    if (t == horizon) break;

    const Vector z = p.dist().sample(x, rng);
    const Vector g = p.decision().eval(x, z);
    if (!g.allFinite()) throw NumericalFailure("non-finite operator evaluation", t);
    obs(t, x, z, g);

    if (t >= plan.burnin) {
      ++averaged;
      xbar += (x - xbar) / static_cast<double>(averaged);
    }

    const double eta = schedule.eta(t);
    const Vector pre = x - eta * g;
    Vector next = p.set().project(pre);
    if ((pre.array() != next.array()).any()) {
      ++traj.clipped_steps;
      if (t >= decile_start) ++traj.clipped_steps_last_decile;
    }
    x = std::move(next);
  }

  traj.final_x = x;
  traj.final_xbar = xbar;
  return traj;
}

Trajectory run_sfb(const Problem& p, const Vector& x0, const StepSchedule& schedule,
                   std::int64_t horizon, std::uint64_t seed, const RecordPlan& plan = {});

/// Checkpoint export: columns t, x[0..d), xbar[0..d), eta.
void write_checkpoints_csv(const Trajectory& trajectory, const std::string& path);

}  // namespace ddsa
