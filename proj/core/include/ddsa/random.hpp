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
#include <random>
#include <span>

#include "ddsa/linalg.hpp"

namespace ddsa {

/// The i-th value of the splitmix64 sequence started at `seed` (i = 0 is the
/// first output). Used to derive stream seeds; never used as a stream itself.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index);

/// Deterministic random stream.
///
/// Replay contract, relied on by every module:
///  - the engine is std::mt19937_64, whose output sequence is pinned by the
///    C++ standard, so a seed names the same stream on every platform;
///  - substream(master, i) is seeded with the (i+1)-th output of a splitmix64
///    generator started at `master`; replicas, Monte-Carlo chunks and cache
///    entries all derive their streams this way and never share state;
///  - uniforms map the top 53 bits of one engine output to (0, 1] (never 0,
///    so logarithms are safe); one uniform consumes exactly one engine output;
///  - standard normals use the Box-Muller transform: each pair of normals
///    consumes exactly two uniforms, a fill of n normals consumes
///    2*ceil(n/2) uniforms, and no half-pair is carried across calls.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(splitmix64_at(master_seed, index));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw in (0, 1].
  double next_uniform() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Fills `out` with independent N(0,1) draws. Consumes 2*ceil(n/2) uniforms.
  void fill_standard_normal(std::span<double> out);
  void fill_standard_normal(Vector& out) {
    fill_standard_normal(std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  }

  /// One N(0,1) draw; consumes a full Box-Muller pair (two uniforms).
  double next_normal() {
    double z;
    fill_standard_normal(std::span<double>(&z, 1));
    return z;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ddsa
