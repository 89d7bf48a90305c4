#include <doctest.h>

#include <cmath>

#include "lbp/adaptive.hpp"

using namespace lbp;

TEST_CASE("target rate is a fixed point") {
    ScaleController ctl(10.0, 0.574, 1000, 500);
    for (int t = 0; t < 50; ++t) ctl.adapt(0.574);
    CHECK(ctl.scale_real() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("clamping at the boundaries") {
    ScaleController low(1.0, 0.574, 1000, 500);
    for (int t = 0; t < 100; ++t) low.adapt(0.0);
    CHECK(low.scale_real() == doctest::Approx(1.0));

    ScaleController high(500.0, 0.234, 1000, 500);
    for (int t = 0; t < 100; ++t) high.adapt(1.0);
    CHECK(high.scale_real() == doctest::Approx(500.0));
}

TEST_CASE("monotone response to the acceptance signal") {
    ScaleController ctl(20.0, 0.5, 1000, 200);
    ctl.adapt(0.9);
    CHECK(ctl.scale_real() == doctest::Approx(20.4).epsilon(1e-12));
    ctl.adapt(0.1);
    CHECK(ctl.scale_real() == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("freezing after the warmup horizon is bit-exact") {
    ScaleController ctl(5.0, 0.574, 100, 400);
    Rng rng = make_rng(17);
    for (int t = 0; t < 100; ++t) ctl.adapt(uniform01(rng));
    CHECK(ctl.frozen());
    const double frozen = ctl.scale_real();
    for (int t = 0; t < 10000; ++t) ctl.adapt(uniform01(rng));
    CHECK(ctl.scale_real() == frozen);  // exact equality
}

TEST_CASE("controller validates its inputs") {
    CHECK_THROWS_AS(ScaleController(1.0, 0.0, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(ScaleController(1.0, 1.0, 10, 5), std::invalid_argument);
    CHECK_THROWS_AS(ScaleController(1.0, 0.5, 10, 0), std::invalid_argument);
    ScaleController ctl(1.0, 0.5, 10, 5);
    CHECK_THROWS_AS(ctl.adapt(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(ctl.adapt(1.1), std::invalid_argument);
}

TEST_CASE("probabilistic rounding: integers, expectation, floor") {
    Rng rng = make_rng(8);
    for (int t = 0; t < 100; ++t) CHECK(probabilistic_round(3.0, rng) == 3);

    long sum = 0;
    const int draws = 100000;
    for (int t = 0; t < draws; ++t) {
        const int r = probabilistic_round(3.7, rng);
        CHECK((r == 3 || r == 4));
        sum += r;
    }
    CHECK(static_cast<double>(sum) / draws == doctest::Approx(3.7).epsilon(0.01 / 3.7));

    for (int t = 0; t < 100; ++t) CHECK(probabilistic_round(0.2, rng) >= 1);
}
