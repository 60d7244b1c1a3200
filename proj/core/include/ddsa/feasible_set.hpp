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

#include "ddsa/linalg.hpp"

namespace ddsa {

enum class SetKind { WholeSpace, Box, Ball };

/// Closed convex feasible set with a nearest-point projection oracle.
/// Projection returns its argument bitwise unchanged on feasible inputs,
/// which is what lets callers detect clipping by exact comparison.
class FeasibleSet {
 public:
  static FeasibleSet whole_space(int dimension);
  static FeasibleSet box(Vector lower, Vector upper);
  static FeasibleSet ball(Vector center, double radius);

  SetKind kind() const { return kind_; }
  int dimension() const { return dimension_; }

  Vector project(const Vector& y) const;
  bool contains(const Vector& y, double tol = 0.0) const;

  /// Distance from y to the boundary: +inf for the whole space, negative
  /// outside the set. Used for the interiority precondition checks.
  double interior_distance(const Vector& y) const;

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const Vector& center() const { return center_; }
  double radius() const { return radius_; }

  std::string describe() const;

 private:
  FeasibleSet() = default;

  SetKind kind_ = SetKind::WholeSpace;
  int dimension_ = 0;
  Vector lower_, upper_;  // box
  Vector center_;         // ball
  double radius_ = 0.0;   // ball
};

}  // namespace ddsa
