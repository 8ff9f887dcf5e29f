#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/optimizer.hpp"
#include "core/rng.hpp"

using namespace gradcode;

TEST_CASE("partial gradient at beta = 0 is -(1/2) sum y x") {
    const Dataset data = synth_data(40, 6, 4, 0.0, 3);
    std::vector<int> rows;
    for (int r = 0; r < 40; ++r) rows.push_back(r);
    const Eigen::VectorXd grad =
        partial_gradient(data.features, data.labels, rows, Eigen::VectorXd::Zero(6));
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(6);
    for (int r = 0; r < 40; ++r) expected -= 0.5 * data.labels[r] * data.features.row(r).transpose();
    CHECK((grad - expected).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("empty subsets give the zero gradient") {
    const Dataset data = synth_data(10, 4, 2, 0.0, 3);
    CHECK(partial_gradient(data.features, data.labels, {}, Eigen::VectorXd::Ones(4)).isZero(0.0));
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(5150);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd x(1, 5);
        Eigen::VectorXd y(1), beta(5);
        for (int c = 0; c < 5; ++c) x(0, c) = 2.0 * rng.normal();
        y[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (int c = 0; c < 5; ++c) beta[c] = rng.normal();

        const auto loss = [&](const Eigen::VectorXd &b) {
            const double margin = y[0] * x.row(0).dot(b);
            return margin > 0.0 ? std::log1p(std::exp(-margin))
                                : -margin + std::log1p(std::exp(margin));
        };
        const Eigen::VectorXd analytic = partial_gradient(x, y, {0}, beta);
        const double h = 1e-6;
        for (int c = 0; c < 5; ++c) {
            Eigen::VectorXd hi = beta, lo = beta;
            hi[c] += h;
            lo[c] -= h;
            const double numeric = (loss(hi) - loss(lo)) / (2.0 * h);
            const double scale = std::max(1e-8, std::abs(numeric));
            CHECK(std::abs(analytic[c] - numeric) / scale < 1e-6);
        }
    }
}

TEST_CASE("synthetic data splits evenly and deterministically") {
    const Dataset data = synth_data(2600, 12, 10, 0.2, 42);
    CHECK(data.train_count == 2600);
    CHECK(data.features.rows() == 2600 + 520);
    REQUIRE(data.subsets.size() == 10);
    for (const auto &subset : data.subsets) CHECK(subset.size() == 260);
    CHECK(data.round_robin_tail == 0);

    const Dataset again = synth_data(2600, 12, 10, 0.2, 42);
    CHECK(data.features == again.features);
    CHECK(data.labels == again.labels);

    const Dataset other = synth_data(2600, 12, 10, 0.2, 43);
    CHECK(data.features != other.features);
}

TEST_CASE("a ragged sample count is distributed round-robin") {
    const Dataset data = synth_data(103, 4, 10, 0.0, 1);
    CHECK(data.round_robin_tail == 3);
    std::size_t total = 0;
    for (const auto &subset : data.subsets) {
        CHECK(subset.size() >= 10);
        CHECK(subset.size() <= 11);
        total += subset.size();
    }
    CHECK(total == 103);
}

TEST_CASE("csv datasets map 0/1 labels onto -1/+1") {
    const std::string path = "/tmp/gradcode_test_data.csv";
    {
        std::ofstream out(path, std::ios::trunc);
        out << "f1,f2,label\n";
        out << "1.0,2.0,1\n0.5,-1.0,0\n-2.5,0.25,1\n3.5,1.5,-1\n0.1,0.2,0\n1,1,1\n";
    }
    const Dataset data = load_csv_dataset(path, 2, 0.0, 7);
    CHECK(data.features.rows() == 6);
    CHECK(data.dim() == 2);
    for (int r = 0; r < 6; ++r) CHECK(std::abs(data.labels[r]) == 1.0);
    int negatives = 0;
    for (int r = 0; r < 6; ++r) negatives += data.labels[r] < 0 ? 1 : 0;
    CHECK(negatives == 3);

    {
        std::ofstream out(path, std::ios::trunc);
        out << "f1,label\n1.0,2\n";
    }
    CHECK_THROWS_AS(load_csv_dataset(path, 1, 0.0, 7), ArgumentError);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_csv_dataset(path, 1, 0.0, 7), IoError);
}

TEST_CASE("auc scores separate rankings") {
    Eigen::VectorXd scores(6), labels(6);
    scores << 0.9, 0.8, 0.7, 0.3, 0.2, 0.1;
    labels << 1, 1, 1, -1, -1, -1;
    CHECK(auc_score(scores, labels) == 1.0);
    labels << -1, -1, -1, 1, 1, 1;
    CHECK(auc_score(scores, labels) == 0.0);
    labels << 1, -1, 1, -1, 1, -1;
    CHECK(auc_score(scores, labels) == doctest::Approx(6.0 / 9.0));
    // ties share rank mass
    scores << 1, 1, 1, 1, 1, 1;
    CHECK(auc_score(scores, labels) == 0.5);
    // single class degenerates to 0.5
    labels.setOnes();
    CHECK(auc_score(scores, labels) == 0.5);
}

TEST_CASE("nag step fixed point and plain-GD reduction") {
    NagState state = NagState::init(Eigen::Vector2d(1.0, -2.0));
    const NagState frozen = nag_step(state, Eigen::Vector2d::Zero(), 0.1, 0.0);
    CHECK(frozen.beta == state.beta);
    CHECK(frozen.iteration == 1);

    const Eigen::Vector2d grad(0.5, -1.0);
    const NagState gd = nag_step(state, grad, 0.2, 0.0);
    CHECK((gd.beta - (state.beta - 0.2 * grad)).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("nag beats plain gradient descent on an ill-conditioned quadratic") {
    // f(b) = 0.5 (b0^2 + 25 b1^2), matched step size eta = 0.02
    const auto grad = [](const Eigen::VectorXd &b) {
        return Eigen::Vector2d(b[0], 25.0 * b[1]).eval();
    };
    const auto loss = [](const Eigen::VectorXd &b) {
        return 0.5 * (b[0] * b[0] + 25.0 * b[1] * b[1]);
    };
    NagState nag = NagState::init(Eigen::Vector2d(10.0, 10.0));
    NagState gd = NagState::init(Eigen::Vector2d(10.0, 10.0));
    for (int t = 0; t < 50; ++t) {
        nag = nag_step(nag, grad(nag.beta), 0.02, 0.9);
        gd = nag_step(gd, grad(gd.beta), 0.02, 0.0);
    }
    CHECK(loss(nag.beta) < loss(gd.beta));
}

TEST_CASE("nag aborts on divergence and non-finite gradients") {
    NagState state = NagState::init(Eigen::Vector2d::Zero());
    CHECK_THROWS_AS(nag_step(state, Eigen::Vector2d(1e13, 0.0), 1.0, 0.0), NumericalError);
    Eigen::Vector2d bad(std::nan(""), 0.0);
    CHECK_THROWS_AS(nag_step(state, bad, 0.1, 0.9), NumericalError);
    CHECK_THROWS_AS(nag_step(state, Eigen::Vector3d::Zero(), 0.1, 0.9), ArgumentError);
}

TEST_CASE("training on planted synthetic data recovers the direction") {
    const Dataset data = synth_data(4000, 50, 10, 0.2, 2718);
    NagState state = NagState::init(Eigen::VectorXd::Zero(50));
    std::vector<int> all_rows;
    for (int r = 0; r < data.train_count; ++r) all_rows.push_back(r);
    const double eta = 0.5 / data.train_count;
    for (int t = 0; t < 200; ++t) {
        const Eigen::VectorXd g = partial_gradient(data.features, data.labels, all_rows, state.beta);
        state = nag_step(state, g, eta, 0.9);
    }
    const double cosine =
        state.beta.dot(data.planted_beta) / (state.beta.norm() * data.planted_beta.norm());
    CHECK(cosine > 0.8);
    CHECK(holdout_auc(data, state.beta) > 0.8);
}
