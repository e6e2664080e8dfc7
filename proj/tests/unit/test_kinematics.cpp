#include "spacelike/errors.hpp"
#include "spacelike/kinematics.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace spacelike;
using namespace spacelike::kinematics;

TEST_CASE("worldline position and proper time") {
    const Worldline w{0.5};
    const Event p = position_at(w, -1.052);
    CHECK(p.x1 == doctest::Approx(-1.052 * std::tanh(0.5)));
    CHECK(testing::near(w.proper_time(-1.052), -0.933, 0.002));
    CHECK(w.lab_time(w.proper_time(2.5)) == doctest::Approx(2.5));
    CHECK(position_at(Worldline{0.0, 1.0, -2.0}, 3.0) == Event{3.0, 0.0, 1.0, -2.0});
}

TEST_CASE("worldline validation") {
    CHECK_NOTHROW(Worldline{0.5}.validate());
    CHECK_THROWS_AS(Worldline{std::nan("")}.validate(), DomainError);
    CHECK_THROWS_AS(Worldline{40.0}.validate(), DomainError);  // tanh rounds to 1
}

TEST_CASE("detector validation") {
    Detector d;
    CHECK_NOTHROW(d.validate());
    d.axes = {{0.0, 0.0, 2.0}};
    CHECK_THROWS_AS(d.validate(), DomainError);
    d = Detector{};
    d.pre_decision = d.dt_window;
    CHECK_THROWS_AS(d.validate(), DomainError);
    d = Detector{};
    d.axis_weights = {0.5};
    CHECK_THROWS_AS(d.validate(), DomainError);
}

TEST_CASE("proper time along signal segments") {
    // S as solved for the reference geometry.
    const Event s{-1.80928247, -0.1222216, 0, 0};
    CHECK(testing::near(proper_time_between(s, {-1.0, 0.0, 0, 0}), 0.800, 0.002));
    CHECK(testing::near(proper_time_between(s, {-1.05207503, -0.48618192, 0, 0}), 0.664, 0.002));
    CHECK(proper_time_between({0, 0, 0, 0}, {1, 1, 0, 0}) == 0.0);
    CHECK(proper_time_between(s, s) == 0.0);
    CHECK_THROWS_AS(proper_time_between({0, 0, 0, 0}, {1, 2, 0, 0}), DomainError);
}

TEST_CASE("branches must point into the causal future") {
    CHECK_NOTHROW(make_branch({0, 0, 0, 0}, {1, 0.5, 0, 0}, "ok"));
    CHECK_THROWS_AS(make_branch({0, 0, 0, 0}, {1, 2, 0, 0}, "spacelike"), DomainError);
    CHECK_THROWS_AS(make_branch({0, 0, 0, 0}, {-1, 0, 0, 0}, "past"), DomainError);
}

TEST_CASE("signal arrival on a worldline") {
    // Light from x1 = -5 reaches the resting origin worldline after 5.
    const Event hit = signal_arrival({0, -5, 0, 0}, Worldline{}, 1.0, 0.0);
    CHECK(hit.t == doctest::Approx(5.0));
    CHECK(hit.x1 == doctest::Approx(0.0));
    CHECK(signal_arrival({0, -5, 0, 0}, Worldline{}, 0.5, 0.0).t == doctest::Approx(10.0));
    // Transverse offset: distance 5 from (3, 4).
    CHECK(lightlike_branch({0, 0, 0, 0}, Worldline{0.0, 3.0, 4.0}, 0.0).t == doctest::Approx(5.0));
    CHECK_THROWS_AS(signal_arrival({0, 0, 0, 0}, Worldline{}, 1.5, 0.0), DomainError);
    // A slow signal never catches a fast receding worldline.
    CHECK_THROWS_AS(signal_arrival({0, -1, 0, 0}, Worldline{2.0}, 0.5, 0.0), GeometryError);
}

TEST_CASE("property: signal arrival is on the worldline and on the signal sphere") {
    CounterRng rng(303);
    for (int i = 0; i < testing::kPropertyCases; ++i) {
        const Worldline w{testing::draw(rng, -1.5, 1.5), testing::draw(rng, -1, 1), testing::draw(rng, -1, 1)};
        const Event src{testing::draw(rng, -3, 0), testing::draw(rng, -2, 2), 0, 0};
        const double v = testing::draw(rng, 0.2, 1.0);
        Event hit;
        try {
            hit = signal_arrival(src, w, v, src.t);
        } catch (const GeometryError&) {
            continue;
        }
        CHECK(hit.t > src.t);
        CHECK(hit.x1 == doctest::Approx(hit.t * std::tanh(w.zeta)));
        const double dist = std::sqrt((hit.x1 - src.x1) * (hit.x1 - src.x1) + hit.x2 * hit.x2 + hit.x3 * hit.x3);
        CHECK(dist == doctest::Approx(v * (hit.t - src.t)).epsilon(1e-9));
    }
}

TEST_CASE("spacelike measurement predicate") {
    Detector a;
    a.id = "A";
    Detector b;
    b.id = "B";
    b.side = Side::B;
    b.worldline = Worldline{0.0, 10.0, 0.0};
    CHECK(spacelike_measurements(a, b, 0.0, 0.0));
    CHECK(spacelike_measurements(a, b, 0.0, 9.0));
    CHECK_FALSE(spacelike_measurements(a, b, 0.0, 10.5));
    b.dt_window = 20.0;
    b.pre_decision = 1.0;
    CHECK_FALSE(spacelike_measurements(a, b, 0.0, 0.0));
}
