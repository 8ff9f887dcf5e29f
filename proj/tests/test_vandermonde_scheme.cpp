#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "core/errors.hpp"
#include "core/gradient_block.hpp"
#include "core/rng.hpp"
#include "core/vandermonde_scheme.hpp"

using namespace gradcode;

namespace {

const std::vector<double> kTheta5 = {-2.0, -1.0, 0.0, 1.0, 2.0};

std::vector<Eigen::VectorXd> random_gradients(int k, int dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Eigen::VectorXd> g(static_cast<std::size_t>(k));
    for (auto &v : g) {
        v.resize(dim);
        for (int c = 0; c < dim; ++c) v[c] = rng.normal();
    }
    return g;
}

std::vector<Eigen::VectorXd> pick_assigned(const VandermondeScheme &scheme, int worker,
                                           const std::vector<Eigen::VectorXd> &all) {
    std::vector<Eigen::VectorXd> out;
    for (int subset : scheme.assignment(worker)) out.push_back(all[static_cast<std::size_t>(subset - 1)]);
    return out;
}

Eigen::VectorXd direct_sum(const std::vector<Eigen::VectorXd> &g) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(g.front().size());
    for (const auto &v : g) sum += v;
    return sum;
}

}  // namespace

TEST_CASE("single-straggler m=2 fixture: encoded payload matches the derived combination") {
    // n=5, d=3, s=1, m=2, theta = -2..2, l=2: worker 1 transmits
    //   2 [g1(0) + 3 g2(0) + 6 g3(0) - 3 g1(1) - 3 g2(1) + 6 g3(1)].
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 2);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    const auto g = random_gradients(5, 2, 7);
    const Eigen::VectorXd payload = scheme.encode(1, pick_assigned(scheme, 1, g));
    REQUIRE(payload.size() == 1);
    const double expected = 2.0 * (g[0][0] + 3.0 * g[1][0] + 6.0 * g[2][0] - 3.0 * g[0][1] -
                                   3.0 * g[1][1] + 6.0 * g[2][1]);
    CHECK(payload[0] == doctest::Approx(expected).epsilon(1e-12));

    const Eigen::VectorXd w = scheme.encode_weights(1);
    CHECK(w.head(6).isApprox((Eigen::VectorXd(6) << 2, -6, 6, -6, 12, 12).finished()));
}

TEST_CASE("two-straggler m=1 fixture: per-coordinate weights") {
    // n=5, d=3, s=2, m=1: worker 1 transmits 2 g1 + 6 g2 + 12 g3 per coordinate.
    const CodingParams params = CodingParams::make(5, 3, 2, 1, 3);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    const auto g = random_gradients(5, 3, 11);
    const Eigen::VectorXd payload = scheme.encode(1, pick_assigned(scheme, 1, g));
    REQUIRE(payload.size() == 3);
    for (int c = 0; c < 3; ++c)
        CHECK(payload[c] ==
              doctest::Approx(2.0 * g[0][c] + 6.0 * g[1][c] + 12.0 * g[2][c]).epsilon(1e-12));
}

TEST_CASE("zero gradients encode to a zero payload") {
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 6);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    std::vector<Eigen::VectorXd> zeros(3, Eigen::VectorXd::Zero(6));
    CHECK(scheme.encode(2, zeros).isZero(0.0));
}

TEST_CASE("encode rejects a wrong number of gradients") {
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 4);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    std::vector<Eigen::VectorXd> two(2, Eigen::VectorXd::Zero(4));
    CHECK_THROWS_AS(scheme.encode(1, two), ArgumentError);
    std::vector<Eigen::VectorXd> bad_dim(3, Eigen::VectorXd::Zero(3));
    CHECK_THROWS_AS(scheme.encode(1, bad_dim), ArgumentError);
}

TEST_CASE("encoding only reads the assigned gradients") {
    const CodingParams params = CodingParams::make(6, 3, 1, 2, 4);
    const auto scheme = VandermondeScheme::build(params);
    auto g = random_gradients(6, 4, 3);
    const Eigen::VectorXd before = scheme.encode(2, pick_assigned(scheme, 2, g));
    g[0] += Eigen::VectorXd::Ones(4) * 100.0;  // subset 1 is not assigned to worker 2
    g[5] -= Eigen::VectorXd::Ones(4) * 42.0;   // nor is subset 6
    const Eigen::VectorXd after = scheme.encode(2, pick_assigned(scheme, 2, g));
    CHECK((before - after).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("encode agrees with the interleaved z_v formulation") {
    // Oracle: payload[v] = z_v B V_col(i) computed from the full matrix Z.
    const CodingParams params = CodingParams::make(6, 4, 2, 2, 8);
    const auto scheme = VandermondeScheme::build(params);
    const auto g = random_gradients(6, 8, 21);
    const Eigen::MatrixXd z = interleave_gradients(g, params.m);
    const Eigen::MatrixXd expected =
        z * scheme.encoding_matrix() * scheme.evaluation_matrix();  // (l/m) x n
    for (int i = 1; i <= 6; ++i) {
        const Eigen::VectorXd payload = scheme.encode(i, pick_assigned(scheme, i, g));
        CHECK(payload.isApprox(expected.col(i - 1), 1e-12));
    }
}

TEST_CASE("gradient interleaving round-trips") {
    const auto g = random_gradients(4, 12, 5);
    for (int m : {1, 2, 3, 4, 6}) {
        const Eigen::MatrixXd z = interleave_gradients(g, m);
        const auto back = deinterleave_gradients(z, m);
        REQUIRE(back.size() == g.size());
        for (std::size_t j = 0; j < g.size(); ++j) CHECK(back[j] == g[j]);
    }
}

TEST_CASE("decode recovers the direct sum for every survivor subset") {
    const CodingParams params = CodingParams::make(7, 4, 2, 2, 6);
    const auto scheme = VandermondeScheme::build(params);
    const auto g = random_gradients(7, 6, 13);
    const Eigen::VectorXd truth = direct_sum(g);

    std::vector<EncodedMessage> all;
    for (int i = 1; i <= 7; ++i) all.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});

    // every C(7,5) subset
    std::vector<int> idx = {0, 1, 2, 3, 4};
    int checked = 0;
    while (true) {
        std::vector<EncodedMessage> chosen;
        for (int j : idx) chosen.push_back(all[static_cast<std::size_t>(j)]);
        const Eigen::VectorXd decoded = scheme.decode(chosen);
        CHECK((decoded - truth).lpNorm<Eigen::Infinity>() <=
              1e-8 * truth.lpNorm<Eigen::Infinity>());
        ++checked;
        int pos = 4;
        while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == 2 + pos) --pos;
        if (pos < 0) break;
        ++idx[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < 5; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    CHECK(checked == 21);
}

TEST_CASE("decode enforces arity and distinctness") {
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 2);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    const auto g = random_gradients(5, 2, 9);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 4; ++i) msgs.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});

    auto three = std::vector<EncodedMessage>(msgs.begin(), msgs.begin() + 3);
    CHECK_THROWS_AS(scheme.decode(three), ArgumentError);

    auto dup = msgs;
    dup[3] = dup[0];
    CHECK_THROWS_AS(scheme.decode(dup), ArgumentError);

    auto bad_id = msgs;
    bad_id[0].worker_id = 9;
    CHECK_THROWS_AS(scheme.decode(bad_id), ArgumentError);
}

TEST_CASE("all-zero messages decode to the zero vector") {
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 2);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 4; ++i) msgs.push_back({i, Eigen::VectorXd::Zero(1)});
    CHECK(scheme.decode(msgs).isZero(0.0));
}

TEST_CASE("padding is stripped on decode") {
    // l = 7 with m = 2 pads one zero; decode returns exactly 7 coordinates.
    const CodingParams params = CodingParams::make(5, 3, 1, 2, 7);
    CHECK(params.padding() == 1);
    const auto scheme = VandermondeScheme::build(params, kTheta5);
    const auto g = random_gradients(5, 7, 17);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 4; ++i) msgs.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});
    const Eigen::VectorXd decoded = scheme.decode(msgs);
    REQUIRE(decoded.size() == 7);
    const Eigen::VectorXd truth = direct_sum(g);
    CHECK((decoded - truth).lpNorm<Eigen::Infinity>() <= 1e-10 * truth.lpNorm<Eigen::Infinity>());
}

TEST_CASE("an ill-conditioned survivor system raises a conditioning error") {
    // Nearly coincident evaluation points push the Vandermonde solve past the
    // default 1e12 ceiling.
    std::vector<double> theta = {1.0, 1.0 + 1e-14, 1.0 + 2e-14, 1.0 + 3e-14, 2.0};
    const CodingParams params = CodingParams::make(5, 3, 2, 1, 2);
    const auto scheme = VandermondeScheme::build(params, theta);
    const auto g = random_gradients(5, 2, 19);
    std::vector<EncodedMessage> msgs;
    for (int i = 1; i <= 3; ++i) msgs.push_back({i, scheme.encode(i, pick_assigned(scheme, i, g))});
    try {
        scheme.decode(msgs);
        FAIL("expected ConditioningError");
    } catch (const ConditioningError &e) {
        CHECK(e.condition_number() > 1e12);
    }
}

TEST_CASE("verify_scheme reports exact recovery with no stragglers") {
    const CodingParams params = CodingParams::make(6, 2, 0, 2, 4);
    const auto scheme = VandermondeScheme::build(params);
    const VerifyReport report = verify_scheme(scheme, 100000, 42, 1e-8);
    CHECK(report.subsets_checked == 1);  // single subset F = [n]
    CHECK(report.exhaustive);
    CHECK(report.failures == 0);
    CHECK(report.worst_rel_error < 1e-10);
}

TEST_CASE("verify_scheme samples when the subset count exceeds the budget") {
    const CodingParams params = CodingParams::make(12, 7, 5, 2, 8);
    const auto scheme = VandermondeScheme::build(params);
    const VerifyReport report = verify_scheme(scheme, 50, 42, 1e-8);
    CHECK_FALSE(report.exhaustive);
    CHECK(report.subsets_checked == 50);
    CHECK(report.failures == 0);
}
