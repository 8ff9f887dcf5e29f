#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "core/params.hpp"
#include "core/vandermonde_scheme.hpp"

namespace gradcode::detail {

/// Shared worker-side encoding: payload[v] = sum over assigned blocks of
/// weights[(j-1)m + u - 1] * g_j(vm + u - 1). Only the supplied gradients are
/// read, so the result cannot depend on data the worker does not hold.
Eigen::VectorXd encode_with_weights(const CodingParams &params, const std::vector<int> &assigned_ids,
                                    const Eigen::VectorXd &weights,
                                    const std::vector<Eigen::VectorXd> &assigned);

/// Validates distinct in-range ids and uniform payload length, then returns
/// ids sorted ascending alongside the payload_dim x count message matrix.
std::pair<std::vector<int>, Eigen::MatrixXd> collect_messages(
    const std::vector<EncodedMessage> &messages, int n, int payload_dim);

double relative_linf_error(const Eigen::VectorXd &actual, const Eigen::VectorXd &expected);

/// Verify loop shared by both schemes: encodes every worker once from seeded
/// normal gradients, then decodes each survivor subset and compares with the
/// direct sum. `decode` receives messages for one subset and may throw; a
/// throw counts as a failure with error 1 (reported, not propagated).
VerifyReport verify_with_decoder(
    const CodingParams &params,
    const std::function<Eigen::VectorXd(int, const std::vector<Eigen::VectorXd> &)> &encode,
    const std::function<Eigen::VectorXd(const std::vector<EncodedMessage> &)> &decode,
    const std::function<std::vector<int>(int)> &assignment, std::uint64_t subset_budget,
    std::uint64_t seed, double tolerance);

}  // namespace gradcode::detail
