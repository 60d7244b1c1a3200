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

#include <optional>
#include <string>
#include <variant>

#include "ddsa/decision_map.hpp"
#include "ddsa/distribution_map.hpp"
#include "ddsa/feasible_set.hpp"

namespace ddsa {

/// Expectation evaluation strategy for mean fields and moments.
struct Analytic {};
struct MonteCarloMode {
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  int workers = 1;
};
using ExpectationMode = std::variant<Analytic, MonteCarloMode>;

/// Declared regularity constants. When present, the compatibility gate
/// gamma * beta < alpha is enforced at construction.
struct DeclaredConstants {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// A decision-dependent problem: feasible set, distribution map, decision
/// map and (optionally declared) regularity constants. Immutable after
/// construction and safe to share across threads.
class Problem {
 public:
  Problem(FeasibleSet set, DistributionMap dist, DecisionMap decision,
          std::optional<DeclaredConstants> constants = std::nullopt);

  const FeasibleSet& set() const { return set_; }
  const DistributionMap& dist() const { return dist_; }
  const DecisionMap& decision() const { return decision_; }

  int dimension() const { return decision_.decision_dimension(); }
  int data_dimension() const { return decision_.data_dimension(); }

  bool has_declared_constants() const { return constants_.has_value(); }

  /// Resolution order for each constant: declared value if present, else the
  /// analytic value of the built-in family, else an error for custom parts.
  double alpha() const;
  double beta() const;
  double gamma() const;
  double lipschitz_bar() const;  // L-bar, Lipschitz constant of G in x

  /// gamma * beta / alpha, the contraction modulus of the equilibrium map.
  double contraction_modulus() const { return gamma() * beta() / alpha(); }

  std::string describe() const;
  std::uint64_t id_hash() const;

  /// The two-dimensional benchmark family: G(x,z) = x - z and
  /// D(x) = N(rho * swap(x), I), where swap exchanges the two coordinates.
  /// Equilibrium at the origin; contraction modulus rho.
  static Problem swap_gaussian(double rho);

 private:
  FeasibleSet set_;
  DistributionMap dist_;
  DecisionMap decision_;
  std::optional<DeclaredConstants> constants_;
};

/// Mean field G_x(y) = E_{z ~ D(x)} G(y, z).
Vector mean_field(const Problem& p, const Vector& x, const Vector& y, const ExpectationMode& mode);

/// One draw z ~ D(x).
inline Vector sample(const Problem& p, const Vector& x, RandomStream& rng) {
  return p.dist().sample(x, rng);
}

}  // namespace ddsa
