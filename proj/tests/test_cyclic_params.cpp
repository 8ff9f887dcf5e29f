#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "core/cyclic.hpp"
#include "core/errors.hpp"
#include "core/params.hpp"

using namespace gradcode;

TEST_CASE("cyclic add and sub wrap on the 1-based circle") {
    CHECK(cyclic_add(4, 3, 5) == 2);
    CHECK(cyclic_sub(1, 1, 5) == 5);
    for (int n : {1, 2, 5, 9})
        for (int i = 1; i <= n; ++i) CHECK(cyclic_add(i, 0, n) == i);
    CHECK(cyclic_add(5, 5, 5) == 5);
    CHECK(cyclic_sub(2, 7, 5) == 5);
    CHECK_THROWS_AS(cyclic_add(0, 1, 5), ArgumentError);
    CHECK_THROWS_AS(cyclic_add(6, 1, 5), ArgumentError);
}

TEST_CASE("assignment matches the cyclic layout") {
    // n=5, d=3: worker 1 holds D1,D2,D3 and worker 5 holds D5,D1,D2
    CHECK(worker_assignment(1, 5, 3) == std::vector<int>{1, 2, 3});
    CHECK(worker_assignment(5, 5, 3) == std::vector<int>{5, 1, 2});
    for (int i = 1; i <= 7; ++i) CHECK(worker_assignment(i, 7, 1) == std::vector<int>{i});
}

TEST_CASE("every subset lands on exactly d workers") {
    for (int n : {4, 5, 8})
        for (int d = 1; d <= n; ++d) {
            std::vector<int> hits(static_cast<std::size_t>(n), 0);
            for (int i = 1; i <= n; ++i)
                for (int subset : worker_assignment(i, n, d))
                    ++hits[static_cast<std::size_t>(subset - 1)];
            for (int c : hits) CHECK(c == d);
        }
}

TEST_CASE("params validate the achievability frontier") {
    const CodingParams p = CodingParams::make(10, 4, 2, 2, 100);
    CHECK(p.k == 10);
    CHECK(p.slack() == 0);
    CHECK(p.payload_dim() == 50);
    CHECK(p.messages_needed() == 8);

    CHECK_THROWS_AS(CodingParams::make(10, 3, 2, 2, 100), AchievabilityError);
    CHECK_THROWS_AS(CodingParams::make(5, 2, 1, 2, 10), AchievabilityError);
    CHECK_THROWS_AS(CodingParams::make(10, 0, 0, 1, 100), ArgumentError);
    CHECK_THROWS_AS(CodingParams::make(10, 11, 0, 1, 100), ArgumentError);
    CHECK_THROWS_AS(CodingParams::make(10, 10, 10, 1, 100), ArgumentError);
    CHECK_THROWS_AS(CodingParams::make(10, 4, -1, 2, 100), ArgumentError);
    CHECK_THROWS_AS(CodingParams::make(10, 4, 1, 2, 0), ArgumentError);

    // slack is accepted, not rejected
    const CodingParams loose = CodingParams::make(10, 6, 2, 2, 100);
    CHECK(loose.slack() == 2);
}

TEST_CASE("padding rounds the dimension up to a multiple of m") {
    const CodingParams p = CodingParams::make(6, 4, 1, 3, 7);
    CHECK(p.raw_dim == 7);
    CHECK(p.gradient_dim == 9);
    CHECK(p.padding() == 2);
    CHECK(p.padding() <= p.m - 1);
    const CodingParams exact = CodingParams::make(6, 4, 1, 3, 9);
    CHECK(exact.padding() == 0);
}

TEST_CASE("default theta grid is the symmetric half-step ladder") {
    // pairs +/-(1 + i/2) in enumeration order, 0 first for odd n
    CHECK(default_theta(5) == std::vector<double>{0.0, 1.0, -1.0, 1.5, -1.5});
    CHECK(default_theta(4) == std::vector<double>{1.0, -1.0, 1.5, -1.5});
    CHECK(default_theta(1) == std::vector<double>{0.0});
    const auto big = default_theta(20);
    CHECK(big.size() == 20);
    CHECK(big[18] == 5.5);
    CHECK(big[19] == -5.5);
    std::vector<double> sorted = big;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i) CHECK(sorted[i - 1] < sorted[i]);
    CHECK(sorted.front() == -5.5);
}
