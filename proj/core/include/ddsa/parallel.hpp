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
#include <functional>

#include "ddsa/linalg.hpp"
#include "ddsa/random.hpp"

namespace ddsa {

/// Worker count: DDSA_WORKERS env var when set, otherwise hardware threads.
int default_workers();

/// Runs body(i) for i in [0, n). Work items are independent; the first
/// exception (lowest index) is rethrown after all workers join, so failures
/// are reported deterministically regardless of scheduling.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body);

/// Monte-Carlo mean of a vector-valued integrand over `samples` draws.
///
/// Determinism contract: samples are split into fixed-size chunks; chunk c
/// draws from RandomStream::substream(seed, c) and accumulates a plain sum;
/// chunk sums are combined by a pairwise tree in chunk order. The result is
/// bit-identical for every worker count.
Vector chunked_mc_mean(
    std::int64_t samples, std::uint64_t seed, int workers, int dim,
    const std::function<void(RandomStream&, std::int64_t count, Vector& sum)>& chunk_sum);

/// Fixed chunk size used by chunked_mc_mean; exposed for tests.
inline constexpr std::int64_t kMcChunkSize = 8192;

}  // namespace ddsa
