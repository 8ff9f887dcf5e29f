#pragma once

#include <vector>

namespace gradcode {

/// Parameters of a coding scheme over n workers and k = n data subsets.
///
/// The triple (d, s, m) is achievable iff d >= s + m; the constructor rejects
/// anything below that frontier. Slack (d > s + m) is accepted but wasted:
/// callers can check slack() and warn.
struct CodingParams {
    int n = 0;             ///< number of workers
    int k = 0;             ///< number of data subsets (always n)
    int d = 0;             ///< data subsets assigned to each worker
    int s = 0;             ///< tolerated stragglers
    int m = 0;             ///< communication reduction factor
    int gradient_dim = 0;  ///< gradient dimension after zero-padding (m | gradient_dim)
    int raw_dim = 0;       ///< caller-facing gradient dimension before padding

    int padding() const { return gradient_dim - raw_dim; }
    int payload_dim() const { return gradient_dim / m; }
    int messages_needed() const { return n - s; }
    int slack() const { return d - s - m; }

    /// Validates and pads. Throws ArgumentError for out-of-range fields and
    /// AchievabilityError when d < s + m.
    static CodingParams make(int n, int d, int s, int m, int dim);
};

/// Default evaluation points: the symmetric grid +/-(1 + i/2), with 0 added
/// for odd n, sorted ascending. Numerically stable for all n <= 20.
std::vector<double> default_theta(int n);

}  // namespace gradcode
