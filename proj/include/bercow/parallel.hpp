// Trial-parallel Monte Carlo with a reduction that does not depend on the
// thread count: trials are split into fixed-size chunks, each with its own
// derived RNG stream, and chunk results are summed in chunk order.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string_view>
#include <thread>
#include <vector>

#include "bercow/rng.hpp"

namespace bercow {

constexpr std::uint64_t kTrialChunk = 4096;

/// Runs `body(trial_index, rng)` for every trial and returns the per-chunk
/// accumulators merged with `merge`, in chunk order.
template <typename Acc, typename Body, typename Merge>
Acc parallel_trials(std::uint64_t trials, std::uint64_t seed, std::string_view stream, Acc init,
                    Body body, Merge merge) {
  const std::uint64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<Acc> partial(chunks, init);
  auto run_chunk = [&](std::uint64_t c) {
    auto rng = Rng::derive(seed, stream, c);
    const std::uint64_t end = std::min(trials, (c + 1) * kTrialChunk);
    for (std::uint64_t t = c * kTrialChunk; t < end; ++t) body(t, rng, partial[c]);
  };
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, std::thread::hardware_concurrency()), chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  Acc total = init;
  for (auto& p : partial) total = merge(std::move(total), p);
  return total;
}

}  // namespace bercow
