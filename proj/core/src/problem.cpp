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
#include "ddsa/problem.hpp"

#include <sstream>

#include "ddsa/errors.hpp"
#include "ddsa/parallel.hpp"

namespace ddsa {

Problem::Problem(FeasibleSet set, DistributionMap dist, DecisionMap decision,
                 std::optional<DeclaredConstants> constants)
    : set_(std::move(set)), dist_(std::move(dist)), decision_(std::move(decision)),
      constants_(constants) {
  if (set_.dimension() != decision_.decision_dimension())
    throw InvalidArgument("feasible set and decision map disagree on decision dimension");
  if (dist_.decision_dimension() != decision_.decision_dimension())
    throw InvalidArgument("distribution map and decision map disagree on decision dimension");
  if (dist_.data_dimension() != decision_.data_dimension())
    throw InvalidArgument("distribution map and decision map disagree on data dimension");
  if (constants_) {
    if (!(constants_->alpha > 0.0)) throw InvalidArgument("declared alpha must be positive");
    if (constants_->beta < 0.0 || constants_->gamma < 0.0)
      throw InvalidArgument("declared beta and gamma must be nonnegative");
    if (!(constants_->gamma * constants_->beta < constants_->alpha))
      throw InvalidArgument("compatibility gate failed: gamma*beta must be < alpha");
  }
}

double Problem::alpha() const {
  if (constants_) return constants_->alpha;
  const double a = decision_.strong_monotonicity();
  if (!(a > 0.0))
    throw UnsupportedMode("alpha unavailable: declare constants or use a built-in decision map");
  return a;
}

double Problem::beta() const {
  if (constants_) return constants_->beta;
  return decision_.lipschitz_z();
}

double Problem::gamma() const {
  if (constants_) return constants_->gamma;
  return dist_.wasserstein_lipschitz();
}

double Problem::lipschitz_bar() const {
  const double l = decision_.lipschitz_x();
  if (!(l > 0.0))
    throw UnsupportedMode("L-bar unavailable: declare it via a built-in or custom decision map");
  return l;
}

std::string Problem::describe() const {
  std::ostringstream os;
  os << set_.describe() << "|" << dist_.describe() << "|" << decision_.describe();
  if (constants_)
    os << "|constants(a=" << constants_->alpha << ",b=" << constants_->beta
       << ",g=" << constants_->gamma << ")";
  return os.str();
}

std::uint64_t Problem::id_hash() const { return fnv1a(describe()); }

Problem Problem::swap_gaussian(double rho) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw InvalidArgument("swap-gaussian family requires rho in [0, 1)");
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  auto dist = DistributionMap::location_scale_gaussian(rho * swap, Vector::Zero(2),
                                                       Matrix::Identity(2, 2));
  return Problem(FeasibleSet::whole_space(2), std::move(dist), DecisionMap::quadratic_tracking(2),
                 DeclaredConstants{1.0, 1.0, rho});
}

Vector mean_field(const Problem& p, const Vector& x, const Vector& y,
                  const ExpectationMode& mode) {
  if (static_cast<int>(x.size()) != p.dimension() || static_cast<int>(y.size()) != p.dimension())
    throw InvalidArgument("mean_field: decision dimension mismatch");

  if (std::holds_alternative<Analytic>(mode)) {
    if (!p.decision().is_affine() || !p.dist().has_analytic_mean())
      throw UnsupportedMode("analytic mean field requires affine G and an analytic mean");
    return p.decision().x_jacobian() * y + p.decision().z_jacobian() * p.dist().mean(x) +
           p.decision().affine_offset();
  }

  const auto& mc = std::get<MonteCarloMode>(mode);
  return chunked_mc_mean(mc.samples, mc.seed, mc.workers, p.dimension(),
                         [&](RandomStream& rng, std::int64_t count, Vector& sum) {
                           for (std::int64_t i = 0; i < count; ++i)
                             sum += p.decision().eval(y, p.dist().sample(x, rng));
                         });
}

}  // namespace ddsa
