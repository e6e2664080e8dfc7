#include "spacelike/errors.hpp"
#include "spacelike/ordering.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace spacelike;
using namespace spacelike::ordering;

TEST_CASE("proper times of the reference branches") {
    const minkowski::Event s{-1.80928247, -0.1222216, 0, 0};
    const auto [ta, tb] = proper_times(s, {-1.0, 0.0, 0, 0}, {-1.05207503, -0.48618192, 0, 0});
    CHECK(testing::near(ta, 0.800, 0.002));
    CHECK(testing::near(tb, 0.664, 0.002));
    CHECK(proper_times(s, s, {-1.0, -0.8, 0, 0}).first == 0.0);
    CHECK(proper_times({0, 0, 0, 0}, {1, 1, 0, 0}, {2, 0, 0, 0}).first == 0.0);
    CHECK_THROWS_AS(proper_times({0, 0, 0, 0}, {1, 3, 0, 0}, {2, 0, 0, 0}), DomainError);
}

TEST_CASE("disjoint intervals decide deterministically") {
    const auto s = decide_order(0.800, 0.664, 0.01, 0.01, 1);
    CHECK(s.first == Side::B);
    CHECK_FALSE(s.overlap);
    const auto t = decide_order(0.7, 0.9, 0.0, 0.0, 1);
    CHECK(t.first == Side::A);
    CHECK_FALSE(t.overlap);
    CHECK_THROWS_AS(decide_order(0.7, 0.9, -1.0, 0.0, 1), DomainError);
}

TEST_CASE("property: disjoint intervals never depend on the seed") {
    CounterRng rng(111);
    for (int i = 0; i < testing::kPropertyCases; ++i) {
        const double ta = testing::draw(rng, 0, 2), tb = testing::draw(rng, 0, 2);
        const double da = testing::draw(rng, 0, 0.1), db = testing::draw(rng, 0, 0.1);
        if (std::abs(ta - tb) <= da + db) continue;
        const Side expected = ta < tb ? Side::A : Side::B;
        for (std::uint64_t seed = 0; seed < 5; ++seed) CHECK(decide_order(ta, tb, da, db, seed).first == expected);
    }
}

TEST_CASE("equal proper times split evenly") {
    int a_first = 0;
    constexpr int n = 100000;
    for (int seed = 0; seed < n; ++seed) {
        const auto s = decide_order(0.7, 0.7, 0.05, 0.05, static_cast<std::uint64_t>(seed));
        CHECK(s.overlap);
        a_first += s.first == Side::A;
    }
    CHECK(std::abs(static_cast<double>(a_first) / n - 0.5) < 0.01);
}

TEST_CASE("property: the overlap rule is label symmetric and monotone") {
    CounterRng rng(222);
    for (int i = 0; i < testing::kPropertyCases; ++i) {
        const double ta = testing::draw(rng, 0, 1), tb = testing::draw(rng, 0, 1);
        const double da = testing::draw(rng, 0, 0.5), db = testing::draw(rng, 0, 0.5);
        const double p = a_first_probability(ta, tb, da, db);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        CHECK(p + a_first_probability(tb, ta, db, da) == doctest::Approx(1.0));
        // Delaying A can only lower its chance of going first.
        CHECK(a_first_probability(ta + 0.05, tb, da, db) <= p + 1e-12);
    }
    CHECK(a_first_probability(0.5, 0.5, 0.1, 0.1) == doctest::Approx(0.5));
    CHECK(a_first_probability(0.5, 0.5, 0.0, 0.0) == doctest::Approx(0.5));
}

TEST_CASE("sharp decision times") {
    kinematics::Detector d;
    d.t_start = 0.0;
    d.dt_window = 1.0;
    d.pre_decision = 0.4;
    d.jitter = 0.0;
    CHECK(sample_sharp_time(d, 9) == 0.4);

    d.jitter = 0.99;
    for (std::uint64_t seed = 0; seed < 100000; ++seed) {
        const double t = sample_sharp_time(d, seed);
        if (!(t > 0.0 && t < 1.0)) {
            FAIL("sample outside the window: " << t);
        }
    }
    CHECK(sample_sharp_time(d, 77) == sample_sharp_time(d, 77));
    CHECK(sample_sharp_time(d, 77) != sample_sharp_time(d, 78));
}

TEST_CASE("schedule keeps each sharp time with its detector") {
    kinematics::Detector a;
    a.t_start = -1.0;
    kinematics::Detector b;
    b.side = Side::B;
    b.t_start = -0.933;
    const auto s = schedule_decisions(a, b, 0.8, 0.664, 3);
    CHECK(s.first == Side::B);
    CHECK(s.tbar_first > b.t_start);
    CHECK(s.tbar_first < b.t_start + b.dt_window);
    CHECK(s.tbar_second > a.t_start);
    CHECK(s.tbar_second < a.t_start + a.dt_window);
}
