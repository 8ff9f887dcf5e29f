#pragma once

#include <vector>

#include "core/errors.hpp"

namespace gradcode {

// Worker and data-subset indices are 1-based and live on the circle
// {1, ..., n}; the additions below wrap n back to 1.

inline int cyclic_add(int a, int b, int n) {
    if (n < 1) throw ArgumentError("cyclic_add: n must be positive");
    if (a < 1 || a > n) throw ArgumentError("cyclic_add: index out of [1, n]");
    int r = (a - 1 + b) % n;
    if (r < 0) r += n;
    return r + 1;
}

inline int cyclic_sub(int a, int b, int n) { return cyclic_add(a, -b, n); }

/// Data subsets held by worker `worker_id`: (i, i+1, ..., i+d-1) on the circle.
inline std::vector<int> worker_assignment(int worker_id, int n, int d) {
    std::vector<int> out(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) out[static_cast<std::size_t>(r)] = cyclic_add(worker_id, r, n);
    return out;
}

}  // namespace gradcode
