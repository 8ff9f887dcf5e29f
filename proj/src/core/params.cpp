#include "core/params.hpp"

#include <string>

#include "core/errors.hpp"

namespace gradcode {

CodingParams CodingParams::make(int n, int d, int s, int m, int dim) {
    if (n < 1) throw ArgumentError("params: n must be positive");
    if (m < 1) throw ArgumentError("params: m must be positive");
    if (s < 0) throw ArgumentError("params: s must be non-negative");
    if (d < 1 || d > n) throw ArgumentError("params: d must satisfy 1 <= d <= n");
    if (dim < 1) throw ArgumentError("params: gradient dimension must be positive");
    if (n - s < 1) throw ArgumentError("params: need at least one surviving worker (s <= n - 1)");
    if (d < s + m) {
        throw AchievabilityError("params: (d=" + std::to_string(d) + ", s=" + std::to_string(s) +
                                 ", m=" + std::to_string(m) +
                                 ") is not achievable: every data subset must reach at least "
                                 "s + m workers, so d/k >= (s+m)/n is required, i.e. d >= s + m "
                                 "at k = n");
    }
    CodingParams p;
    p.n = n;
    p.k = n;
    p.d = d;
    p.s = s;
    p.m = m;
    p.raw_dim = dim;
    p.gradient_dim = ((dim + m - 1) / m) * m;
    return p;
}

std::vector<double> default_theta(int n) {
    if (n < 1) throw ArgumentError("default_theta: n must be positive");
    std::vector<double> theta;
    theta.reserve(static_cast<std::size_t>(n));
    if (n % 2 == 1) theta.push_back(0.0);
    // Enumeration order of the +/-(1 + i/2) pairs, not sorted: consecutive
    // workers then alternate in sign and ascend in magnitude, so every cyclic
    // root window mixes small and large points. Sorting the grid instead
    // makes the windows one-sided and costs several digits of decode
    // accuracy at n = 20.
    for (int i = 0; i < n / 2; ++i) {
        const double v = 1.0 + 0.5 * i;
        theta.push_back(v);
        theta.push_back(-v);
    }
    return theta;
}

}  // namespace gradcode
