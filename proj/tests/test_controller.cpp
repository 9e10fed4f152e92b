#include <doctest.h>

#include <cmath>

#include "ncs/controller.hpp"

using namespace ncs;

TEST_CASE("pure proportional") {
    PiState state;
    const double u = pi_step(state, {1.0, 0.0}, 0.5, 0.1);
    CHECK(u == 0.5);
}

TEST_CASE("pure discrete integrator accumulates k*Ts") {
    PiState state;
    const double ts = 0.1;
    double u = 0.0;
    for (int k = 1; k <= 25; ++k) {
        u = pi_step(state, {0.0, 1.0}, 1.0, ts);
        CHECK(u == doctest::Approx(k * ts).epsilon(1e-12));
    }
    CHECK(u == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("hand-evaluated backward-Euler recursion") {
    // gains (2, 0.5), Ts = 0.1, e = [1, 1, 1] -> u = [2.05, 2.10, 2.15]
    PiState state;
    const PiGains gains{2.0, 0.5};
    CHECK(pi_step(state, gains, 1.0, 0.1) == doctest::Approx(2.05).epsilon(1e-12));
    CHECK(pi_step(state, gains, 1.0, 0.1) == doctest::Approx(2.10).epsilon(1e-12));
    CHECK(pi_step(state, gains, 1.0, 0.1) == doctest::Approx(2.15).epsilon(1e-12));
}

TEST_CASE("constant error closed form is exact") {
    PiState state;
    const PiGains gains{0.7, 0.3};
    const double e0 = -0.4;
    const double ts = 0.05;
    for (int k = 1; k <= 200; ++k) {
        const double u = pi_step(state, gains, e0, ts);
        CHECK(u == doctest::Approx(gains.kp * e0 + gains.ki * e0 * k * ts).epsilon(1e-12));
    }
}

TEST_CASE("output scales exactly with the error sequence") {
    // alpha a power of two keeps the scaling bit-exact
    const double alpha = 4.0;
    PiState a, b;
    const PiGains gains{1.3, 0.9};
    for (int k = 0; k < 100; ++k) {
        const double e = std::sin(0.3 * k);
        const double ua = pi_step(a, gains, e, 0.1);
        const double ub = pi_step(b, gains, alpha * e, 0.1);
        CHECK(ub == alpha * ua);
    }
}

TEST_CASE("zero gains give zero output") {
    PiState state;
    for (int k = 0; k < 50; ++k) {
        CHECK(pi_step(state, {0.0, 0.0}, 123.4, 0.1) == 0.0);
    }
}
