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
#include "ddsa/sfb.hpp"

#include "ddsa/csv.hpp"

namespace ddsa {

StepResult sfb_step(const Problem& p, const Vector& x, double eta, RandomStream& rng) {
  if (eta < 0.0) throw InvalidArgument("sfb_step requires eta >= 0");
  StepResult r;
  r.sample = p.dist().sample(x, rng);
  const Vector g = p.decision().eval(x, r.sample);
  if (!g.allFinite()) throw NumericalFailure("non-finite operator evaluation", 0);
  const Vector pre = x - eta * g;
  r.next_x = p.set().project(pre);
  r.residual = eta > 0.0 ? Vector((pre - r.next_x) / eta) : Vector(Vector::Zero(x.size()));
  return r;
}

Trajectory run_sfb(const Problem& p, const Vector& x0, const StepSchedule& schedule,
                   std::int64_t horizon, std::uint64_t seed, const RecordPlan& plan) {
  RandomStream rng(seed);
  return run_sfb_observed(p, x0, schedule, horizon, rng, plan,
                          [](std::int64_t, const Vector&, const Vector&, const Vector&) {});
}

void write_checkpoints_csv(const Trajectory& trajectory, const std::string& path) {
  CsvWriter csv(path);
  const Eigen::Index d = trajectory.final_x.size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index c = 0; c < d; ++c) header.push_back("x_" + std::to_string(c));
  for (Eigen::Index c = 0; c < d; ++c) header.push_back("xbar_" + std::to_string(c));
  header.push_back("eta");
  csv.row(header);
  for (const auto& cp : trajectory.checkpoints) {
    csv.field(cp.t);
    for (Eigen::Index c = 0; c < d; ++c) csv.field(cp.x(c));
    for (Eigen::Index c = 0; c < d; ++c) csv.field(cp.xbar(c));
    csv.field(cp.eta);
    csv.end_row();
  }
}

}  // namespace ddsa
