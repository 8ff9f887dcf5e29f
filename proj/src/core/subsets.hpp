#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/rng.hpp"

namespace gradcode {

/// C(n, k) in a double-safe uint64 (n <= 64); saturates instead of overflowing.
inline std::uint64_t binomial_count(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
    if (acc > 1.8e18L) return UINT64_MAX;
    return static_cast<std::uint64_t>(acc + 0.5L);
}

/// Calls fn for every size-k subset of {0..n-1} when their count fits the
/// budget, otherwise for `budget` uniformly sampled subsets (seeded).
/// Returns true when the sweep was exhaustive.
inline bool for_each_subset(int n, int k, std::uint64_t budget, std::uint64_t seed,
                            const std::function<void(const std::vector<int> &)> &fn) {
    const std::uint64_t total = binomial_count(n, k);
    if (total <= budget) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            fn(idx);
            int pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int j = pos + 1; j < k; ++j)
                idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
        return true;
    }
    Rng rng(seed);
    for (std::uint64_t t = 0; t < budget; ++t) fn(rng.sample_subset(n, k));
    return false;
}

}  // namespace gradcode
