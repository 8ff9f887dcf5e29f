#include "core/scheme_detail.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/subsets.hpp"

namespace gradcode::detail {

Eigen::VectorXd encode_with_weights(const CodingParams &params, const std::vector<int> &assigned_ids,
                                    const Eigen::VectorXd &weights,
                                    const std::vector<Eigen::VectorXd> &assigned) {
    if (assigned.size() != assigned_ids.size())
        throw ArgumentError("encode: expected exactly " + std::to_string(assigned_ids.size()) +
                            " assigned gradients, got " + std::to_string(assigned.size()));
    for (const auto &g : assigned)
        if (g.size() != params.raw_dim)
            throw ArgumentError("encode: gradient dimension mismatch (expected " +
                                std::to_string(params.raw_dim) + ")");
    const int m = params.m;
    const Eigen::Index slices = params.payload_dim();
    Eigen::VectorXd payload = Eigen::VectorXd::Zero(slices);
    for (std::size_t r = 0; r < assigned_ids.size(); ++r) {
        const int subset = assigned_ids[r];
        const Eigen::VectorXd &g = assigned[r];
        for (int u = 0; u < m; ++u) {
            const double w = weights[static_cast<Eigen::Index>(subset - 1) * m + u];
            if (w == 0.0) continue;
            for (Eigen::Index v = 0; v < slices; ++v) {
                const Eigen::Index coord = v * m + u;
                if (coord < params.raw_dim) payload[v] += w * g[coord];
            }
        }
    }
    return payload;
}

std::pair<std::vector<int>, Eigen::MatrixXd> collect_messages(
    const std::vector<EncodedMessage> &messages, int n, int payload_dim) {
    std::vector<int> order(messages.size());
    for (std::size_t i = 0; i < messages.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return messages[static_cast<std::size_t>(a)].worker_id <
               messages[static_cast<std::size_t>(b)].worker_id;
    });
    std::vector<int> ids;
    ids.reserve(messages.size());
    Eigen::MatrixXd packed(payload_dim, static_cast<Eigen::Index>(messages.size()));
    for (std::size_t c = 0; c < order.size(); ++c) {
        const EncodedMessage &msg = messages[static_cast<std::size_t>(order[c])];
        if (msg.worker_id < 1 || msg.worker_id > n)
            throw ArgumentError("decode: worker id " + std::to_string(msg.worker_id) +
                                " out of [1, n]");
        if (!ids.empty() && ids.back() == msg.worker_id)
            throw ArgumentError("decode: duplicate message from worker " +
                                std::to_string(msg.worker_id));
        if (msg.payload.size() != payload_dim)
            throw ArgumentError("decode: payload of worker " + std::to_string(msg.worker_id) +
                                " has wrong dimension");
        ids.push_back(msg.worker_id);
        packed.col(static_cast<Eigen::Index>(c)) = msg.payload;
    }
    return {std::move(ids), std::move(packed)};
}

double relative_linf_error(const Eigen::VectorXd &actual, const Eigen::VectorXd &expected) {
    const double scale = expected.lpNorm<Eigen::Infinity>();
    const double err = (actual - expected).lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return err == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return err / scale;
}

VerifyReport verify_with_decoder(
    const CodingParams &params,
    const std::function<Eigen::VectorXd(int, const std::vector<Eigen::VectorXd> &)> &encode,
    const std::function<Eigen::VectorXd(const std::vector<EncodedMessage> &)> &decode,
    const std::function<std::vector<int>(int)> &assignment, std::uint64_t subset_budget,
    std::uint64_t seed, double tolerance) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> gradients(static_cast<std::size_t>(params.k));
    for (auto &g : gradients) {
        g.resize(params.raw_dim);
        for (Eigen::Index c = 0; c < g.size(); ++c) g[c] = rng.normal();
    }
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(params.raw_dim);
    for (const auto &g : gradients) truth += g;

    std::vector<EncodedMessage> all(static_cast<std::size_t>(params.n));
    for (int i = 1; i <= params.n; ++i) {
        std::vector<Eigen::VectorXd> assigned;
        for (int subset : assignment(i)) assigned.push_back(gradients[static_cast<std::size_t>(subset - 1)]);
        all[static_cast<std::size_t>(i - 1)] = {i, encode(i, assigned)};
    }

    VerifyReport report;
    report.tolerance = tolerance;
    const int need = params.messages_needed();
    report.exhaustive = for_each_subset(params.n, need, subset_budget, seed ^ 0x9e3779b97f4a7c15ULL,
                                        [&](const std::vector<int> &subset) {
        std::vector<EncodedMessage> chosen;
        chosen.reserve(subset.size());
        for (int idx : subset) chosen.push_back(all[static_cast<std::size_t>(idx)]);
        double err;
        try {
            err = relative_linf_error(decode(chosen), truth);
        } catch (const Error &) {
            err = 1.0;
        }
        ++report.subsets_checked;
        if (err > tolerance) ++report.failures;
        if (err > report.worst_rel_error) {
            report.worst_rel_error = err;
            report.worst_subset.clear();
            for (int idx : subset) report.worst_subset.push_back(idx + 1);
        }
    });
    return report;
}

}  // namespace gradcode::detail
