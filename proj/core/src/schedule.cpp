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
#include "ddsa/schedule.hpp"

#include "ddsa/errors.hpp"

namespace ddsa {

StepSchedule::StepSchedule(double eta0, double nu) : eta0_(eta0), nu_(nu) {
  if (!(eta0 > 0.0)) throw InvalidArgument("step schedule requires eta0 > 0");
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("step schedule requires nu in (0, 1]");
}

}  // namespace ddsa
