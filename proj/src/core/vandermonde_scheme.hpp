#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "core/params.hpp"

namespace gradcode {

/// One worker's transmitted vector: dim/m coordinates.
struct EncodedMessage {
    int worker_id = 0;  ///< 1-based
    Eigen::VectorXd payload;
};

struct VerifyReport {
    double worst_rel_error = 0.0;
    std::vector<int> worst_subset;  ///< 1-based worker ids
    std::uint64_t subsets_checked = 0;
    std::uint64_t failures = 0;  ///< subsets whose error exceeded the tolerance
    bool exhaustive = true;
    double tolerance = 0.0;
};

/// Exact-recovery scheme built from recursive polynomials over n distinct
/// evaluation points. The (n-s) x n matrix V holds point powers, the
/// (m n) x (n-s) matrix B holds the coefficients of p_i^(u); worker i
/// transmits Z B V_col(i), and any n-s workers determine the gradient sum.
class VandermondeScheme {
public:
    static constexpr double kDefaultConditionLimit = 1e12;

    /// Builds V and B. Empty theta selects the default grid. Throws
    /// ConstructionError on repeated points.
    static VandermondeScheme build(const CodingParams &params, std::vector<double> theta = {});

    const CodingParams &params() const { return params_; }
    /// Evaluation points; empty when the scheme was loaded from a container
    /// that does not determine them (n - s == 1).
    const std::vector<double> &theta() const { return theta_; }
    const Eigen::MatrixXd &evaluation_matrix() const { return v_; }
    const Eigen::MatrixXd &encoding_matrix() const { return b_; }

    /// Subsets held by worker i, in transmission order.
    std::vector<int> assignment(int worker_id) const;

    /// Per-worker encoding weights B V_col(i): entry (j-1)m + (u-1) multiplies
    /// g_j(vm + u - 1); zero outside the assigned blocks.
    Eigen::VectorXd encode_weights(int worker_id) const;

    /// Worker-side encoding. `assigned` holds exactly the d gradients of
    /// assignment(worker_id), in that order, each of length raw_dim.
    Eigen::VectorXd encode(int worker_id, const std::vector<Eigen::VectorXd> &assigned) const;

    /// Master-side decoding from exactly n - s distinct workers. Solves the
    /// survivor Vandermonde system with a row-pivoted factorization (never an
    /// explicit inverse) and returns the length-raw_dim gradient sum.
    /// Throws ConditioningError when the condition estimate exceeds the limit.
    Eigen::VectorXd decode(const std::vector<EncodedMessage> &messages,
                           double condition_limit = kDefaultConditionLimit) const;

    /// Restores a scheme from container fields (see matrix_io).
    static VandermondeScheme from_matrices(const CodingParams &params, Eigen::MatrixXd v,
                                           Eigen::MatrixXd b);

private:
    VandermondeScheme() = default;

    CodingParams params_;
    std::vector<double> theta_;
    Eigen::MatrixXd v_;        // (n-s) x n
    Eigen::MatrixXd b_;        // (m n) x (n-s)
    Eigen::MatrixXd weights_;  // B * V, cached per-worker encoding weights
};

/// Encode-then-decode against direct summation over survivor subsets:
/// exhaustive when C(n, n-s) <= subset_budget, else sampled (seeded).
/// Gradients are seeded standard normals of the scheme's raw dimension.
/// Decode failures are reported in the error statistics, never thrown.
VerifyReport verify_scheme(const VandermondeScheme &scheme, std::uint64_t subset_budget,
                           std::uint64_t seed, double tolerance);

}  // namespace gradcode
