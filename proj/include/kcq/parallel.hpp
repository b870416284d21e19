#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

#include "kcq/rng.hpp"

namespace kcq {

/// Runs `trial(index, rng, acc)` for every index in [0, trials), each with a
/// private Rng seeded by `seed + index`. Per-thread accumulators are merged
/// with `+=`; with integer counters the result does not depend on `threads`.
template <class Acc, class Trial>
Acc run_trials(std::uint64_t trials, unsigned threads, std::uint64_t seed, Trial&& trial) {
    threads = std::max(1u, threads);
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(trials, 1)));
    std::vector<Acc> partial(threads);
    auto work = [&](unsigned t) {
        const std::uint64_t begin = trials * t / threads;
        const std::uint64_t end = trials * (t + 1) / threads;
        for (std::uint64_t i = begin; i < end; ++i) {
            Rng rng(seed + i);
            trial(i, rng, partial[t]);
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    Acc total{};
    for (const auto& p : partial) total += p;
    return total;
}

}  // namespace kcq
