#pragma once

#include <cstdint>
#include <vector>

namespace gradcode {

/// Shifted-exponential runtime model: a worker's computation time for one
/// data subset is t1 + Exp(lambda1) and its transmission time for a full
/// l-dimensional vector is t2 + Exp(lambda2); with d subsets and an m-fold
/// reduction the variable parts scale to rates lambda1/d and m*lambda2.
struct RuntimeModel {
    double lambda1 = 0.0;  ///< computation straggle rate
    double lambda2 = 0.0;  ///< communication straggle rate
    double t1 = 0.0;       ///< minimum per-subset computation time
    double t2 = 0.0;       ///< minimum full-vector communication time
    int n = 0;             ///< number of workers

    static RuntimeModel make(double lambda1, double lambda2, double t1, double t2, int n);
};

/// Pr(T^{(d,m)} <= t): the hypoexponential sum of Exp(lambda1/d) and
/// Exp(m lambda2), switching to the Erlang(2, m lambda2) form when the two
/// rates agree to within 1e-9 relative.
double worker_time_cdf(const RuntimeModel &model, double t, int d, int m);

/// E[(n-s)th order statistic of n iid T^{(d,m)}] by adaptive quadrature on
/// the survival function; absolute target 1e-8. Throws NumericalError with
/// the achieved tolerance if refinement stalls.
double expected_order_statistic(const RuntimeModel &model, int d, int s, int m);

/// E[T_tot] = d t1 + t2/m + E[T_{d,s,m}]. Accepts s <= d - m (waiting for
/// extra workers is allowed, just slower) and rejects s > d - m as
/// unachievable.
double expected_total_runtime(const RuntimeModel &model, int d, int s, int m);

struct TripleEvaluation {
    int d = 0, s = 0, m = 0;
    double expected_total = 0.0;
};

struct OptimizeResult {
    TripleEvaluation best;
    std::vector<TripleEvaluation> table;  ///< all (d, m in 1..d, s = d-m) cells
};

/// Exhaustive scan of d in [1, n], m in [1, d] on the s = d - m frontier.
/// Ties keep the smaller d, then the smaller m.
OptimizeResult optimize_triple(const RuntimeModel &model);

/// Closed form for the computation-dominant regime (m = 1, s = d - 1):
/// d t1 + (d/lambda1) sum_{i=0}^{n-d} 1/(n-i).
double computation_dominant_expected(const RuntimeModel &model, int d);

/// Optimal d for the computation-dominant closed form: n when
/// lambda1 t1 < (sum_{i=2}^n 1/i)/(n-1), else 1. Cross-checks by brute force
/// that the closed-form argmin lies in {1, n}.
int prop1_optimal_d(const RuntimeModel &model);

/// Brute-force argmin of the computation-dominant closed form over d.
int prop1_bruteforce_argmin(const RuntimeModel &model);

/// Optimal ratio alpha = m/n in the communication-dominant regime: the root
/// of alpha/(1-alpha) + log(1-alpha) = lambda2 t2 on (0, 1), bisected to 1e-10.
double prop2_optimal_alpha(const RuntimeModel &model);

struct MonteCarloResult {
    double mean = 0.0;
    double ci_low = 0.0;   ///< 99% normal confidence interval
    double ci_high = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

/// Simulates the (n-s)th order statistic of the per-worker totals.
MonteCarloResult monte_carlo_total(const RuntimeModel &model, int d, int s, int m,
                                   std::uint64_t trials, std::uint64_t seed);

}  // namespace gradcode
