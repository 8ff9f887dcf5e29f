#include "core/vandermonde_scheme.hpp"

#include <Eigen/LU>
#include <limits>
#include <string>
#include <utility>

#include "core/cyclic.hpp"
#include "core/errors.hpp"
#include "core/polynomials.hpp"
#include "core/scheme_detail.hpp"

namespace gradcode {

VandermondeScheme VandermondeScheme::build(const CodingParams &params, std::vector<double> theta) {
    if (theta.empty()) theta = default_theta(params.n);
    if (static_cast<int>(theta.size()) != params.n)
        throw ArgumentError("scheme: need exactly n evaluation points");
    check_distinct_theta(theta);

    VandermondeScheme scheme;
    scheme.params_ = params;
    scheme.theta_ = std::move(theta);
    scheme.v_ = vandermonde_matrix(scheme.theta_, params.n - params.s);
    scheme.b_ = build_matrix_b_alg1(scheme.theta_, params);
    scheme.weights_ = scheme.b_ * scheme.v_;
    return scheme;
}

VandermondeScheme VandermondeScheme::from_matrices(const CodingParams &params, Eigen::MatrixXd v,
                                                   Eigen::MatrixXd b) {
    VandermondeScheme scheme;
    scheme.params_ = params;
    scheme.v_ = std::move(v);
    scheme.b_ = std::move(b);
    if (scheme.v_.rows() != params.n - params.s || scheme.v_.cols() != params.n ||
        scheme.b_.rows() != static_cast<Eigen::Index>(params.m) * params.n ||
        scheme.b_.cols() != params.n - params.s)
        throw ArgumentError("scheme: matrix dimensions do not match the parameters");
    if (scheme.v_.rows() >= 2) {
        scheme.theta_.resize(static_cast<std::size_t>(params.n));
        for (int i = 0; i < params.n; ++i) scheme.theta_[static_cast<std::size_t>(i)] = scheme.v_(1, i);
    }
    scheme.weights_ = scheme.b_ * scheme.v_;
    return scheme;
}

std::vector<int> VandermondeScheme::assignment(int worker_id) const {
    return worker_assignment(worker_id, params_.n, params_.d);
}

Eigen::VectorXd VandermondeScheme::encode_weights(int worker_id) const {
    if (worker_id < 1 || worker_id > params_.n)
        throw ArgumentError("encode: worker id out of [1, n]");
    return weights_.col(worker_id - 1);
}

Eigen::VectorXd VandermondeScheme::encode(int worker_id,
                                          const std::vector<Eigen::VectorXd> &assigned) const {
    return detail::encode_with_weights(params_, assignment(worker_id), encode_weights(worker_id),
                                       assigned);
}

Eigen::VectorXd VandermondeScheme::decode(const std::vector<EncodedMessage> &messages,
                                          double condition_limit) const {
    const int need = params_.messages_needed();
    if (static_cast<int>(messages.size()) != need)
        throw ArgumentError("decode: need exactly " + std::to_string(need) + " messages, got " +
                            std::to_string(messages.size()));
    auto [ids, packed] = detail::collect_messages(messages, params_.n, params_.payload_dim());

    Eigen::MatrixXd a(need, need);
    for (int c = 0; c < need; ++c) a.col(c) = v_.col(ids[static_cast<std::size_t>(c)] - 1);

    // Row-pivoted factorization of A^T: pivoting runs over the survivors
    // rather than the power rows, which keeps the forward error well below
    // the plain factorization of A on these graded systems.
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.transpose());
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(cond <= condition_limit))
        throw ConditioningError("decode: survivor system condition estimate " +
                                    std::to_string(cond) + " exceeds limit " +
                                    std::to_string(condition_limit),
                                cond);

    // Extraction vectors A^{-1} e_{n-d+u}, u = 1..m, via the transposed
    // factorization plus two refinement sweeps.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(need, params_.m);
    for (int u = 0; u < params_.m; ++u) rhs(params_.n - params_.d + u, u) = 1.0;
    Eigen::MatrixXd extraction = lu.transpose().solve(rhs);
    for (int sweep = 0; sweep < 2; ++sweep)
        extraction += lu.transpose().solve(rhs - a * extraction).eval();

    const Eigen::MatrixXd sums = packed * extraction;  // (dim/m) x m
    Eigen::VectorXd out(params_.gradient_dim);
    for (Eigen::Index v = 0; v < sums.rows(); ++v)
        for (int u = 0; u < params_.m; ++u) out[v * params_.m + u] = sums(v, u);
    return out.head(params_.raw_dim);
}

VerifyReport verify_scheme(const VandermondeScheme &scheme, std::uint64_t subset_budget,
                           std::uint64_t seed, double tolerance) {
    const double unguarded = std::numeric_limits<double>::infinity();
    return detail::verify_with_decoder(
        scheme.params(),
        [&](int i, const std::vector<Eigen::VectorXd> &g) { return scheme.encode(i, g); },
        [&](const std::vector<EncodedMessage> &msgs) { return scheme.decode(msgs, unguarded); },
        [&](int i) { return scheme.assignment(i); }, subset_budget, seed, tolerance);
}

}  // namespace gradcode
