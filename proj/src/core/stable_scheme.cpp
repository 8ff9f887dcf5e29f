#include "core/stable_scheme.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "core/cyclic.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/scheme_detail.hpp"
#include "core/subsets.hpp"

namespace gradcode {

namespace {

Eigen::MatrixXd draw_gaussian(int rows, int cols, Rng &rng) {
    Eigen::MatrixXd v(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) v(r, c) = rng.normal();
    return v;
}

/// Columns i+1, ..., i+n2 (circularly, 1-based worker index i) of the first
/// `rows` rows: the block of V that B_i must annihilate.
Eigen::MatrixXd circulant_block(const Eigen::MatrixXd &v, int i, int n2, int first_row, int rows) {
    const int n = static_cast<int>(v.cols());
    Eigen::MatrixXd out(rows, n2);
    for (int j = 1; j <= n2; ++j)
        out.col(j - 1) = v.col(cyclic_add(i, j, n) - 1).segment(first_row, rows);
    return out;
}

bool assemble_blocks(const Eigen::MatrixXd &v, const CodingParams &params, Eigen::MatrixXd *b_out) {
    const int n = params.n, d = params.d, m = params.m;
    const int n2 = n - d;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m) * n, n - params.s);
    for (int i = 1; i <= n; ++i) {
        if (n2 > 0) {
            const Eigen::MatrixXd s_i = circulant_block(v, i, n2, 0, n2);
            const Eigen::MatrixXd r_i = circulant_block(v, i, n2, n2, m);
            // Construction-time inversion is one-time, so full pivoting and no
            // conditioning ceiling.
            Eigen::FullPivLU<Eigen::MatrixXd> lu(s_i.transpose());
            if (!lu.isInvertible()) return false;
            b.block(static_cast<Eigen::Index>(i - 1) * m, 0, m, n2) =
                -lu.solve(r_i.transpose()).transpose();
        }
        for (int u = 0; u < m; ++u) b(static_cast<Eigen::Index>(i - 1) * m + u, n2 + u) = 1.0;
    }
    *b_out = std::move(b);
    return true;
}

}  // namespace

StableScheme StableScheme::build(const CodingParams &params, double kappa, std::uint64_t seed) {
    if (params.slack() != 0)
        throw ArgumentError("stable scheme: requires d = s + m (got slack " +
                            std::to_string(params.slack()) + ")");
    if (!(kappa > 1.0)) throw ArgumentError("stable scheme: kappa must exceed 1");

    Rng rng(seed);
    Eigen::MatrixXd v, b;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxRedraws && !ok; ++attempt) {
        v = draw_gaussian(params.n - params.s, params.n, rng);
        ok = assemble_blocks(v, params, &b);
    }
    if (!ok)
        throw ConstructionError("stable scheme: singular S_i blocks after " +
                                std::to_string(static_cast<int>(kMaxRedraws)) + " draws");

    StableScheme scheme;
    scheme.params_ = params;
    scheme.kappa_ = kappa;
    scheme.seed_ = seed;
    scheme.v_ = std::move(v);
    scheme.b_ = std::move(b);
    scheme.weights_ = scheme.b_ * scheme.v_;
    return scheme;
}

StableScheme StableScheme::from_matrices(const CodingParams &params, double kappa,
                                         std::uint64_t seed, Eigen::MatrixXd v, Eigen::MatrixXd b) {
    StableScheme scheme;
    scheme.params_ = params;
    scheme.kappa_ = kappa;
    scheme.seed_ = seed;
    scheme.v_ = std::move(v);
    scheme.b_ = std::move(b);
    if (scheme.v_.rows() != params.n - params.s || scheme.v_.cols() != params.n ||
        scheme.b_.rows() != static_cast<Eigen::Index>(params.m) * params.n ||
        scheme.b_.cols() != params.n - params.s)
        throw ArgumentError("stable scheme: matrix dimensions do not match the parameters");
    scheme.weights_ = scheme.b_ * scheme.v_;
    return scheme;
}

std::vector<int> StableScheme::assignment(int worker_id) const {
    return worker_assignment(worker_id, params_.n, params_.d);
}

Eigen::VectorXd StableScheme::encode_weights(int worker_id) const {
    if (worker_id < 1 || worker_id > params_.n)
        throw ArgumentError("encode: worker id out of [1, n]");
    return weights_.col(worker_id - 1);
}

Eigen::VectorXd StableScheme::encode(int worker_id,
                                     const std::vector<Eigen::VectorXd> &assigned) const {
    return detail::encode_with_weights(params_, assignment(worker_id), encode_weights(worker_id),
                                       assigned);
}

Eigen::VectorXd StableScheme::decode(const std::vector<EncodedMessage> &messages,
                                     double condition_limit) const {
    if (condition_limit == 0.0) condition_limit = kappa_;
    const int need = params_.messages_needed();
    if (static_cast<int>(messages.size()) < need)
        throw ArgumentError("decode: need at least " + std::to_string(need) + " messages, got " +
                            std::to_string(messages.size()));
    auto [ids, packed] = detail::collect_messages(messages, params_.n, params_.payload_dim());

    Eigen::MatrixXd v_f(need, static_cast<Eigen::Index>(ids.size()));
    for (std::size_t c = 0; c < ids.size(); ++c)
        v_f.col(static_cast<Eigen::Index>(c)) = v_.col(ids[c] - 1);
    const Eigen::MatrixXd gram = v_f * v_f.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(cond <= condition_limit))
        throw ConditioningError("decode: cond(V_F V_F^T) = " + std::to_string(cond) +
                                    " exceeds kappa = " + std::to_string(condition_limit),
                                cond);

    // Minimum-norm right inverse applied to the extraction columns:
    // x_u = V_F^T (V_F V_F^T)^{-1} e_{n-d+u}. The complete orthogonal
    // decomposition computes the same minimum-norm solution without forming
    // the Gram matrix, so the error scales with cond(V_F), not its square.
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(need, params_.m);
    for (int u = 0; u < params_.m; ++u) rhs(params_.n - params_.d + u, u) = 1.0;
    const Eigen::MatrixXd extraction =
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(v_f).solve(rhs);

    const Eigen::MatrixXd sums = packed * extraction;
    Eigen::VectorXd out(params_.gradient_dim);
    for (Eigen::Index v = 0; v < sums.rows(); ++v)
        for (int u = 0; u < params_.m; ++u) out[v * params_.m + u] = sums(v, u);
    return out.head(params_.raw_dim);
}

VerifyReport verify_scheme(const StableScheme &scheme, std::uint64_t subset_budget,
                           std::uint64_t seed, double tolerance) {
    const double unguarded = std::numeric_limits<double>::infinity();
    return detail::verify_with_decoder(
        scheme.params(),
        [&](int i, const std::vector<Eigen::VectorXd> &g) { return scheme.encode(i, g); },
        [&](const std::vector<EncodedMessage> &msgs) { return scheme.decode(msgs, unguarded); },
        [&](int i) { return scheme.assignment(i); }, subset_budget, seed, tolerance);
}

double subset_gram_condition(const Eigen::MatrixXd &v, const std::vector<int> &columns) {
    Eigen::MatrixXd v_f(v.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        v_f.col(static_cast<Eigen::Index>(c)) = v.col(columns[c]);
    const Eigen::MatrixXd gram = v_f * v_f.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

GammaEstimate estimate_gamma(const Eigen::MatrixXd &v, int n1, int n2, double kappa,
                             std::uint64_t subset_budget, std::uint64_t seed) {
    const int n = static_cast<int>(v.cols());
    if (!(n > n1 && n1 > n2 && n2 >= 0)) throw ArgumentError("estimate_gamma: need n > n1 > n2 >= 0");
    if (v.rows() != n1) throw ArgumentError("estimate_gamma: V must have n1 rows");

    GammaEstimate result;
    // Circulant-consecutive invertibility of the first n2 rows; independent of n3.
    for (int i = 1; i <= n && n2 > 0; ++i) {
        Eigen::MatrixXd block(n2, n2);
        for (int j = 0; j < n2; ++j) block.col(j) = v.col(cyclic_add(i, j, n) - 1).head(n2);
        if (!Eigen::FullPivLU<Eigen::MatrixXd>(block).isInvertible()) return result;
    }

    for (int n3 = n1; n3 <= n; ++n3) {
        bool all_ok = true;
        const bool exhaustive = for_each_subset(
            n, n3, subset_budget, seed + static_cast<std::uint64_t>(n3),
            [&](const std::vector<int> &subset) {
                if (all_ok && !(subset_gram_condition(v, subset) <= kappa)) all_ok = false;
            });
        if (all_ok) {
            result.n3 = n3;
            result.feasible = true;
            result.exhaustive = exhaustive;
            return result;
        }
    }
    return result;
}

GammaEstimate estimate_gamma_gaussian(int n, int n1, int n2, double kappa,
                                      std::uint64_t subset_budget, std::uint64_t seed) {
    Rng rng(seed);
    return estimate_gamma(draw_gaussian(n1, n, rng), n1, n2, kappa, subset_budget, seed);
}

double binary_entropy(double q) {
    if (q <= 0.0 || q >= 1.0) return 0.0;
    return -q * std::log(q) - (1.0 - q) * std::log(1.0 - q);
}

double rip_gamma_bound(int n, int n1, double kappa) {
    if (!(n > n1 && n1 > 0)) throw ArgumentError("rip_gamma_bound: need n > n1 > 0");
    const double ratio = static_cast<double>(n1) / n;
    if (!(ratio > 0.5)) throw ArgumentError("rip_gamma_bound: requires n1/n > 1/2");
    const double r = std::sqrt(ratio);
    const double kappa_floor = std::pow((1.0 + r) / (1.0 - r), 2.0);
    if (!(kappa > kappa_floor))
        throw ArgumentError("rip_gamma_bound: kappa must exceed ((1+sqrt(n1/n))/(1-sqrt(n1/n)))^2 = " +
                            std::to_string(kappa_floor));

    const auto f = [&](double x) {
        return std::sqrt(n1 / x) + std::sqrt(2.0 * n / x * binary_entropy(x / n));
    };
    const double target = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
    // f strictly decreases on [n1, n] with f(n) = sqrt(n1/n) < target.
    if (f(static_cast<double>(n1)) <= target) return static_cast<double>(n1);
    double lo = static_cast<double>(n1), hi = static_cast<double>(n);
    for (int it = 0; it < 200 && hi - lo > 1e-10 * n; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ConditionAudit condition_audit(const Eigen::MatrixXd &v, int subset_size, std::uint64_t budget,
                               std::uint64_t seed) {
    const int n = static_cast<int>(v.cols());
    if (subset_size < 1 || subset_size > n)
        throw ArgumentError("condition_audit: subset size out of [1, n]");
    std::vector<double> conds;
    ConditionAudit audit;
    audit.exhaustive = for_each_subset(n, subset_size, budget, seed,
                                       [&](const std::vector<int> &subset) {
                                           conds.push_back(subset_gram_condition(v, subset));
                                       });
    audit.subsets_checked = conds.size();
    std::sort(conds.begin(), conds.end());
    audit.worst_cond = conds.back();
    audit.p95_cond = conds[static_cast<std::size_t>(std::ceil(0.95 * conds.size())) - 1];
    return audit;
}

}  // namespace gradcode
