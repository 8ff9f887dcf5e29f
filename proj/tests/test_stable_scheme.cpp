#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "core/cyclic.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"
#include "core/stable_scheme.hpp"
#include "core/subsets.hpp"

using namespace gradcode;

namespace {

std::vector<Eigen::VectorXd> random_gradients(int k, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> g(static_cast<std::size_t>(k));
    for (auto &v : g) {
        v.resize(dim);
        for (int c = 0; c < dim; ++c) v[c] = rng.normal();
    }
    return g;
}

std::vector<Eigen::VectorXd> pick_assigned(const StableScheme &scheme, int worker,
                                           const std::vector<Eigen::VectorXd> &all) {
    std::vector<Eigen::VectorXd> out;
    for (int subset : scheme.assignment(worker)) out.push_back(all[static_cast<std::size_t>(subset - 1)]);
    return out;
}

double block_orthogonality_residual(const StableScheme &scheme) {
    const CodingParams &p = scheme.params();
    const Eigen::MatrixXd &v = scheme.evaluation_matrix();
    const Eigen::MatrixXd &b = scheme.encoding_matrix();
    const int n2 = p.n - p.d;
    double worst = 0.0;
    for (int i = 1; i <= p.n; ++i) {
        Eigen::MatrixXd s_i(n2, n2), r_i(p.m, n2);
        for (int j = 1; j <= n2; ++j) {
            const int col = cyclic_add(i, j, p.n) - 1;
            s_i.col(j - 1) = v.col(col).head(n2);
            r_i.col(j - 1) = v.col(col).tail(p.m);
        }
        const Eigen::MatrixXd block = b.block(static_cast<Eigen::Index>(i - 1) * p.m, 0, p.m, n2);
        worst = std::max(worst, (block * s_i + r_i).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

}  // namespace

TEST_CASE("block orthogonality holds for every worker and seed") {
    const CodingParams params = CodingParams::make(10, 4, 2, 2, 8);
    for (std::uint64_t seed : {1ULL, 2ULL, 99ULL, 12345ULL}) {
        const auto scheme = StableScheme::build(params, 1e12, seed);
        CHECK(block_orthogonality_residual(scheme) < 1e-9);
    }
}

TEST_CASE("identity blocks occupy the last m columns") {
    const CodingParams params = CodingParams::make(8, 5, 2, 3, 6);
    const auto scheme = StableScheme::build(params, 1e12, 7);
    const Eigen::MatrixXd &b = scheme.encoding_matrix();
    for (int i = 0; i < 8; ++i)
        for (int u = 0; u < 3; ++u)
            for (int c = 0; c < 3; ++c)
                CHECK(b(i * 3 + u, 8 - 5 + c) == (c == u ? 1.0 : 0.0));
}

TEST_CASE("equal seeds build identical schemes") {
    const CodingParams params = CodingParams::make(9, 4, 1, 3, 6);
    const auto a = StableScheme::build(params, 1e10, 77);
    const auto b = StableScheme::build(params, 1e10, 77);
    CHECK(a.evaluation_matrix() == b.evaluation_matrix());
    CHECK(a.encoding_matrix() == b.encoding_matrix());
    const auto c = StableScheme::build(params, 1e10, 78);
    CHECK(a.evaluation_matrix() != c.evaluation_matrix());
}

TEST_CASE("stable build rejects slack and non-frontier parameters") {
    CHECK_THROWS_AS(StableScheme::build(CodingParams::make(8, 5, 1, 2, 4), 1e10, 1),
                    ArgumentError);
    CHECK_THROWS_AS(StableScheme::build(CodingParams::make(8, 4, 2, 2, 4), 0.5, 1), ArgumentError);
}

TEST_CASE("exact recovery over exhaustive survivor subsets") {
    const CodingParams params = CodingParams::make(8, 4, 2, 2, 8);
    const auto scheme = StableScheme::build(params, 1e12, 1);
    const VerifyReport report = verify_scheme(scheme, 1000000, 3, 1e-7);
    CHECK(report.exhaustive);
    CHECK(report.subsets_checked == binomial_count(8, 6));
    CHECK(report.failures == 0);
    CHECK(report.worst_rel_error < 1e-7);

    // even a draw with one badly conditioned survivor Gram stays within the
    // scheme-level 1e-6 bound
    const auto unlucky = StableScheme::build(params, 1e12, 5);
    const VerifyReport loose = verify_scheme(unlucky, 1000000, 3, 1e-6);
    CHECK(loose.failures == 0);
    CHECK(loose.worst_rel_error < 1e-6);
}

TEST_CASE("full-information decode is exact when s = 0") {
    const CodingParams params = CodingParams::make(6, 3, 0, 3, 9);
    const auto scheme = StableScheme::build(params, 1e12, 9);
    const auto g = random_gradients(6, 9, 31);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(9);
    for (const auto &v : g) truth += v;
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 6; ++i) msgs.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});
    CHECK((scheme.decode(msgs) - truth).lpNorm<Eigen::Infinity>() <=
          1e-9 * truth.lpNorm<Eigen::Infinity>());
}

TEST_CASE("decoding from all workers beats the worst proper subset") {
    const CodingParams params = CodingParams::make(8, 4, 2, 2, 4);
    const auto scheme = StableScheme::build(params, 1e12, 11);
    const auto g = random_gradients(8, 4, 37);
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(4);
    for (const auto &v : g) truth += v;
    std::vector<EncodedMessage> all;
    for (int i = 1; i <= 8; ++i) all.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});

    const double full_err = (scheme.decode(all) - truth).lpNorm<Eigen::Infinity>();
    double worst_subset_err = 0.0;
    for (int skip1 = 0; skip1 < 8; ++skip1)
        for (int skip2 = skip1 + 1; skip2 < 8; ++skip2) {
            std::vector<EncodedMessage> subset;
            for (int i = 0; i < 8; ++i)
                if (i != skip1 && i != skip2) subset.push_back(all[static_cast<std::size_t>(i)]);
            worst_subset_err = std::max(
                worst_subset_err, (scheme.decode(subset) - truth).lpNorm<Eigen::Infinity>());
        }
    CHECK(full_err <= worst_subset_err);
}

TEST_CASE("zero messages decode to zero") {
    const CodingParams params = CodingParams::make(6, 4, 2, 2, 4);
    const auto scheme = StableScheme::build(params, 1e12, 13);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 4; ++i) msgs.push_back({i, Eigen::VectorXd::Zero(2)});
    CHECK(scheme.decode(msgs).isZero(0.0));
}

TEST_CASE("decode applies the kappa ceiling") {
    const CodingParams params = CodingParams::make(6, 4, 2, 2, 4);
    const auto scheme = StableScheme::build(params, 1.0 + 1e-9, 17);  // absurdly tight ceiling
    const auto g = random_gradients(6, 4, 41);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 4; ++i) msgs.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});
    try {
        scheme.decode(msgs);
        FAIL("expected ConditioningError");
    } catch (const ConditioningError &e) {
        CHECK(e.condition_number() > 1.0);
    }
    // too few messages is an arity problem, not conditioning
    msgs.pop_back();
    CHECK_THROWS_AS(scheme.decode(msgs), ArgumentError);
}

TEST_CASE("s_kappa never exceeds the frontier tolerance") {
    for (int d : {2, 3, 5}) {
        const CodingParams params = CodingParams::make(8, d, d - 2, 2, 4);
        const auto scheme = StableScheme::build(params, 1e12, 23);
        CHECK(scheme.s_kappa() <= params.d - params.m);
    }
}

TEST_CASE("estimate_gamma returns n1 when kappa is unbounded") {
    Rng rng(5);
    Eigen::MatrixXd v(5, 8);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 8; ++c) v(r, c) = rng.normal();
    const GammaEstimate g =
        estimate_gamma(v, 5, 3, std::numeric_limits<double>::infinity(), 1000000, 1);
    CHECK(g.feasible);
    CHECK(g.n3 == 5);
    CHECK(g.exhaustive);
}

TEST_CASE("estimate_gamma reports infeasibility when no subset size can comply") {
    Rng rng(6);
    Eigen::MatrixXd v(5, 8);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 8; ++c) v(r, c) = rng.normal();
    // every nontrivial Gram has condition > 1, so a ceiling at 1 fails all levels
    const GammaEstimate g = estimate_gamma(v, 5, 3, 1.000001, 1000000, 1);
    CHECK_FALSE(g.feasible);
    CHECK(g.n3 == 0);
}

TEST_CASE("estimate_gamma matches exhaustive enumeration and decreases with kappa") {
    Rng rng(7);
    Eigen::MatrixXd v(5, 8);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 8; ++c) v(r, c) = rng.normal();

    // oracle: direct enumeration of every subset at every n3
    const auto oracle = [&](double kappa) -> int {
        for (int n3 = 5; n3 <= 8; ++n3) {
            bool ok = true;
            std::vector<bool> mask(8, false);
            std::fill(mask.begin(), mask.begin() + n3, true);
            std::vector<int> subset;
            do {
                subset.clear();
                for (int i = 0; i < 8; ++i)
                    if (mask[static_cast<std::size_t>(i)]) subset.push_back(i);
                if (!(subset_gram_condition(v, subset) <= kappa)) {
                    ok = false;
                    break;
                }
            } while (std::prev_permutation(mask.begin(), mask.end()));
            if (ok) return n3;
        }
        return 0;
    };

    int previous = 9;
    for (double kappa : {1e2, 1e3, 1e4, 1e6, 1e9}) {
        const GammaEstimate g = estimate_gamma(v, 5, 3, kappa, 1000000, 1);
        const int expected = oracle(kappa);
        CHECK(g.feasible == (expected != 0));
        if (g.feasible) {
            CHECK(g.n3 == expected);
            CHECK(g.n3 <= previous);  // monotone non-increasing in kappa
            previous = g.n3;
        }
    }
}

TEST_CASE("binary entropy peaks at ln 2") {
    CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
}

TEST_CASE("rip bound: f decreases, the boundary kappa pushes the bound to n") {
    const int n = 100, n1 = 70;
    const auto f = [&](double x) {
        return std::sqrt(static_cast<double>(n1) / x) +
               std::sqrt(2.0 * n / x * binary_entropy(x / n));
    };
    CHECK(f(n1) > f(n));

    const double r = std::sqrt(static_cast<double>(n1) / n);
    const double kappa_floor = std::pow((1.0 + r) / (1.0 - r), 2.0);
    const double near_floor = rip_gamma_bound(n, n1, kappa_floor * 1.0001);
    CHECK(near_floor > 0.98 * n);

    // bisection agrees with f at the returned point
    const double kappa = kappa_floor * 10.0;
    const double bound = rip_gamma_bound(n, n1, kappa);
    const double target = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
    CHECK(f(bound) == doctest::Approx(target).epsilon(1e-6));

    CHECK_THROWS_AS(rip_gamma_bound(10, 4, 100.0), ArgumentError);   // n1/n <= 1/2
    CHECK_THROWS_AS(rip_gamma_bound(n, n1, kappa_floor * 0.5), ArgumentError);
}

TEST_CASE("condition audit orders its percentiles") {
    Rng rng(8);
    Eigen::MatrixXd v(6, 12);
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 12; ++c) v(r, c) = rng.normal();
    const ConditionAudit audit = condition_audit(v, 8, 1000000, 2);
    CHECK(audit.exhaustive);
    CHECK(audit.subsets_checked == binomial_count(12, 8));
    CHECK(audit.worst_cond >= audit.p95_cond);
    CHECK(audit.p95_cond >= 1.0);

    const ConditionAudit sampled = condition_audit(v, 8, 64, 2);
    CHECK_FALSE(sampled.exhaustive);
    CHECK(sampled.subsets_checked == 64);
}
