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
#include "ddsa/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "ddsa/errors.hpp"

namespace ddsa {

int default_workers() {
  if (const char* env = std::getenv("DDSA_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body) {
  if (n <= 0) return;
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || n == 1) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<std::int64_t>(workers, n));
  pool.reserve(static_cast<std::size_t>(count));
  for (int w = 0; w < count; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::int64_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Vector chunked_mc_mean(
    std::int64_t samples, std::uint64_t seed, int workers, int dim,
    const std::function<void(RandomStream&, std::int64_t count, Vector& sum)>& chunk_sum) {
  if (samples <= 0) throw InsufficientSamples("Monte-Carlo expectation requires samples >= 1");
  const std::int64_t chunks = (samples + kMcChunkSize - 1) / kMcChunkSize;
  std::vector<Vector> sums(static_cast<std::size_t>(chunks));

  parallel_for(chunks, workers, [&](std::int64_t c) {
    const std::int64_t lo = c * kMcChunkSize;
    const std::int64_t count = std::min<std::int64_t>(kMcChunkSize, samples - lo);
    RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(c));
    Vector sum = Vector::Zero(dim);
    chunk_sum(rng, count, sum);
    sums[static_cast<std::size_t>(c)] = std::move(sum);
  });

  // Pairwise tree over chunk sums, in chunk order.
  std::vector<Vector> level = std::move(sums);
  while (level.size() > 1) {
    std::vector<Vector> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) up.push_back(level[i] + level[i + 1]);
    if (level.size() % 2 == 1) up.push_back(level.back());
    level = std::move(up);
  }
  return level.front() / static_cast<double>(samples);
}

}  // namespace ddsa
