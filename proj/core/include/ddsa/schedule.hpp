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

#include <cmath>
#include <cstdint>

namespace ddsa {

/// Power-law step schedule eta_t = eta0 * t^(-nu).
/// Convention: t = 0 is treated as t = 1, so eta(0) = eta0; the asymptotic
/// schedule is unchanged and no first-step special case is needed elsewhere.
class StepSchedule {
 public:
  StepSchedule(double eta0, double nu);

  double eta(std::int64_t t) const {
    return eta0_ * std::pow(static_cast<double>(t < 1 ? 1 : t), -nu_);
  }

  double eta0() const { return eta0_; }
  double nu() const { return nu_; }

 private:
  double eta0_;
  double nu_;
};

}  // namespace ddsa
