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
#include "ddsa/feasible_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddsa/errors.hpp"

namespace ddsa {

FeasibleSet FeasibleSet::whole_space(int dimension) {
  if (dimension <= 0) throw InvalidArgument("feasible set dimension must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::WholeSpace;
  s.dimension_ = dimension;
  return s;
}

FeasibleSet FeasibleSet::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw InvalidArgument("box bounds must be nonempty and of equal dimension");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i)))
      throw InvalidArgument("box requires lower[i] <= upper[i] at coordinate " + std::to_string(i));
  }
  FeasibleSet s;
  s.kind_ = SetKind::Box;
  s.dimension_ = static_cast<int>(lower.size());
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

FeasibleSet FeasibleSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw InvalidArgument("ball center must be nonempty");
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::Ball;
  s.dimension_ = static_cast<int>(center.size());
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

Vector FeasibleSet::project(const Vector& y) const {
  if (static_cast<int>(y.size()) != dimension_)
    throw InvalidArgument("projection input has dimension " + std::to_string(y.size()) +
                          ", set has dimension " + std::to_string(dimension_));
  switch (kind_) {
    case SetKind::WholeSpace:
      return y;
    case SetKind::Box: {
      Vector p = y;
      for (Eigen::Index i = 0; i < p.size(); ++i)
        p(i) = std::clamp(p(i), lower_(i), upper_(i));
      return p;
    }
    case SetKind::Ball: {
      const Vector diff = y - center_;
      const double norm = diff.norm();
      if (norm <= radius_) return y;
      // shave roundoff until the result re-projects to itself, so projecting
      // twice is a bitwise no-op
      constexpr double kOneBelow = 0x1.fffffffffffffp-1;
      Vector p = center_ + diff * (radius_ / norm);
      for (int i = 0; i < 64; ++i) {
        Vector d = p - center_;
        const double n = d.norm();
        if (n <= radius_) break;
        p = center_ + d * std::min(radius_ / n, kOneBelow);
      }
      return p;
    }
  }
  throw InvalidArgument("unknown set kind");
}

bool FeasibleSet::contains(const Vector& y, double tol) const {
  return interior_distance(y) >= -tol;
}

double FeasibleSet::interior_distance(const Vector& y) const {
  if (static_cast<int>(y.size()) != dimension_)
    throw InvalidArgument("interior_distance input dimension mismatch");
  switch (kind_) {
    case SetKind::WholeSpace:
      return std::numeric_limits<double>::infinity();
    case SetKind::Box: {
      double d = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < y.size(); ++i)
        d = std::min({d, y(i) - lower_(i), upper_(i) - y(i)});
      return d;
    }
    case SetKind::Ball:
      return radius_ - (y - center_).norm();
  }
  throw InvalidArgument("unknown set kind");
}

std::string FeasibleSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case SetKind::WholeSpace:
      os << "whole-space(d=" << dimension_ << ")";
      break;
    case SetKind::Box:
      os << "box(d=" << dimension_ << ",lo=" << lower_.transpose() << ",hi=" << upper_.transpose() << ")";
      break;
    case SetKind::Ball:
      os << "ball(d=" << dimension_ << ",c=" << center_.transpose() << ",r=" << radius_ << ")";
      break;
  }
  return os.str();
}

}  // namespace ddsa
