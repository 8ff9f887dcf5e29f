#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/params.hpp"
#include "core/vandermonde_scheme.hpp"

namespace gradcode {

/// Numerically stable variant: V has independent standard normal entries and
/// the per-subset blocks of B are B_i = -R_i S_i^{-1}, where S_i (R_i) is the
/// submatrix of V's first n-d (last m) rows over the circularly consecutive
/// columns i+1, ..., i+n-d. Decoding right-multiplies the received rows by
/// the minimum-norm right inverse of the survivor columns, so any subset of
/// at least n-s workers whose Gram matrix stays within the condition ceiling
/// recovers the sum.
class StableScheme {
public:
    static constexpr double kDefaultKappa = 1e12;
    static constexpr int kMaxRedraws = 16;

    /// Requires d = s + m. Draws V from the seed and redraws (up to
    /// kMaxRedraws) until every S_i is invertible; throws ConstructionError
    /// when that never happens.
    static StableScheme build(const CodingParams &params, double kappa, std::uint64_t seed);

    const CodingParams &params() const { return params_; }
    double kappa() const { return kappa_; }
    std::uint64_t seed() const { return seed_; }
    /// Straggler tolerance the scheme is built for on the d = s + m frontier;
    /// kappa-specific estimates come from estimate_gamma.
    int s_kappa() const { return params_.s; }
    const Eigen::MatrixXd &evaluation_matrix() const { return v_; }
    const Eigen::MatrixXd &encoding_matrix() const { return b_; }

    std::vector<int> assignment(int worker_id) const;
    Eigen::VectorXd encode_weights(int worker_id) const;
    Eigen::VectorXd encode(int worker_id, const std::vector<Eigen::VectorXd> &assigned) const;

    /// Decodes from any >= n - s distinct workers. Throws ConditioningError
    /// (carrying the measured value) when cond(V_F V_F^T) exceeds
    /// condition_limit, which defaults to the scheme's kappa.
    Eigen::VectorXd decode(const std::vector<EncodedMessage> &messages,
                           double condition_limit = 0.0) const;

    static StableScheme from_matrices(const CodingParams &params, double kappa, std::uint64_t seed,
                                      Eigen::MatrixXd v, Eigen::MatrixXd b);

private:
    StableScheme() = default;

    CodingParams params_;
    double kappa_ = kDefaultKappa;
    std::uint64_t seed_ = 0;
    Eigen::MatrixXd v_;
    Eigen::MatrixXd b_;
    Eigen::MatrixXd weights_;
};

VerifyReport verify_scheme(const StableScheme &scheme, std::uint64_t subset_budget,
                           std::uint64_t seed, double tolerance);

/// cond(V_F V_F^T) = ratio of extreme eigenvalues of the subset Gram matrix;
/// infinity when singular to working precision.
double subset_gram_condition(const Eigen::MatrixXd &v, const std::vector<int> &columns);

struct GammaEstimate {
    int n3 = 0;            ///< smallest feasible subset size, valid when feasible
    bool feasible = false; ///< false: no n3 <= n satisfies the ceiling for this V
    bool exhaustive = true;
};

/// Empirical gamma(n, n1, n2, kappa) for one concrete V (n1 x n): the smallest
/// n3 in [n1, n] such that every (or, above the budget, every sampled) subset
/// of n3 columns has Gram condition <= kappa, provided every n2 x n2
/// circularly consecutive submatrix of V's first n2 rows is invertible.
GammaEstimate estimate_gamma(const Eigen::MatrixXd &v, int n1, int n2, double kappa,
                             std::uint64_t subset_budget, std::uint64_t seed);

/// Same, drawing V with standard normal entries from the seed.
GammaEstimate estimate_gamma_gaussian(int n, int n1, int n2, double kappa,
                                      std::uint64_t subset_budget, std::uint64_t seed);

/// Binary entropy in nats.
double binary_entropy(double q);

/// Diagnostic upper bound on gamma(n, n1, *, kappa) for Gaussian V: inverts
/// f(x) = sqrt(n1/x) + sqrt((2n/x) H(x/n)) at (sqrt(kappa)-1)/(sqrt(kappa)+1)
/// by bisection. Requires n1/n > 1/2 and kappa above the admissible floor.
double rip_gamma_bound(int n, int n1, double kappa);

struct ConditionAudit {
    double worst_cond = 0.0;
    double p95_cond = 0.0;
    std::uint64_t subsets_checked = 0;
    bool exhaustive = true;
};

/// Worst and 95th-percentile Gram condition over column subsets of the given
/// size (exhaustive within the budget, sampled otherwise).
ConditionAudit condition_audit(const Eigen::MatrixXd &v, int subset_size, std::uint64_t budget,
                               std::uint64_t seed);

}  // namespace gradcode
