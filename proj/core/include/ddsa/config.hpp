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

#include "ddsa/problem.hpp"
#include "ddsa/schedule.hpp"

namespace ddsa {

/// Key-value configuration tree, parsed from `key = value` lines with
/// dotted keys ('#' starts a comment). Vectors are comma-separated, matrices
/// use ';' between rows (row-major). Parse and type errors name the key and
/// line.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  /// Sets or overrides a key (line number 0 marks overrides).
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  Vector get_vector(const std::string& key) const;
  Matrix get_matrix(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  int line_of(const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
};

/// Builds the problem described by the `problem.*` and `constants.*` keys.
/// Families: "swap-gaussian" (key problem.rho), "location-scale"
/// (problem.A / problem.base-mean / problem.base-cov plus a decision map),
/// "multiplayer" (two players, problem.playerK.* keys).
Problem problem_from_config(const Config& cfg);

/// Step schedule from run.eta0 / run.nu (defaults 1.0 and 0.75).
StepSchedule schedule_from_config(const Config& cfg);

}  // namespace ddsa
