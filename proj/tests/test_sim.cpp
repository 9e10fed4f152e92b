#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>

#include "ncs/error.hpp"
#include "ncs/objective.hpp"
#include "ncs/rng.hpp"
#include "ncs/sim.hpp"

using namespace ncs;

namespace {

const PlantParams kPlant{5.0, 1.5, 1.0};

SimConfig short_sim(double horizon = 10.0, std::uint64_t seed = 1) {
    SimConfig sim;
    sim.horizon = horizon;
    sim.seed = seed;
    return sim;
}

ChannelConfig no_impairments() {
    ChannelConfig cfg;
    cfg.drop_prob = 0.0;
    cfg.delay.kind = DelayKind::constant;
    cfg.delay.value = 0.0;
    cfg.delay.d_max = 0.0;
    return cfg;
}

ChannelConfig nominal_channel() {
    return ChannelConfig{}; // drop 0.1, uniform delay on [0, 0.3]
}

bool bitwise_equal(const Trace& a, const Trace& b) {
    if (a.rows.size() != b.rows.size() || a.diverged != b.diverged) {
        return false;
    }
    auto same = [](double x, double y) {
        return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y);
    };
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (!same(a.rows[i].t, b.rows[i].t) || !same(a.rows[i].r, b.rows[i].r) ||
            !same(a.rows[i].y, b.rows[i].y) || !same(a.rows[i].u, b.rows[i].u) ||
            !same(a.rows[i].e, b.rows[i].e)) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("zero controller leaves the loop at rest") {
    RunResult result = run_closed_loop(kPlant, {0.0, 0.0}, nominal_channel(), short_sim());
    for (const TraceRow& row : result.trace.rows) {
        CHECK(row.u == 0.0);
        CHECK(row.y == 0.0);
        CHECK(row.e == 1.0);
    }
}

TEST_CASE("trace has one row per control period") {
    SimConfig sim = short_sim(10.0);
    RunResult result = run_closed_loop(kPlant, {0.3, 0.2}, nominal_channel(), sim);
    CHECK(result.trace.rows.size() == 101);
    for (std::size_t k = 0; k < result.trace.rows.size(); ++k) {
        CHECK(result.trace.rows[k].t == doctest::Approx(k * 0.1).epsilon(1e-12));
        CHECK(result.trace.rows[k].e == result.trace.rows[k].r - result.trace.rows[k].y);
    }
}

TEST_CASE("event log is gap-free per channel") {
    RunResult result = run_closed_loop(kPlant, {0.3, 0.2}, nominal_channel(), short_sim(5.0));
    std::uint64_t next_sc = 0;
    std::uint64_t next_ca = 0;
    for (const EventRow& row : result.events.rows) {
        if (row.channel == ChannelId::sensor_to_ctrl) {
            CHECK(row.seq == next_sc++);
        } else {
            CHECK(row.seq == next_ca++);
        }
        CHECK(row.dropped == !row.delay.has_value());
    }
    CHECK(next_sc == 51);
    CHECK(next_ca == 51);
}

TEST_CASE("identical seeds reproduce the run bitwise") {
    SimConfig sim = short_sim(10.0, 77);
    RunResult a = run_closed_loop(kPlant, {0.4, 0.3}, nominal_channel(), sim);
    RunResult b = run_closed_loop(kPlant, {0.4, 0.3}, nominal_channel(), sim);
    CHECK(bitwise_equal(a.trace, b.trace));
    REQUIRE(a.events.rows.size() == b.events.rows.size());
    for (std::size_t i = 0; i < a.events.rows.size(); ++i) {
        CHECK(a.events.rows[i].dropped == b.events.rows[i].dropped);
        CHECK(a.events.rows[i].delay == b.events.rows[i].delay);
        CHECK(a.events.rows[i].discarded_ooo == b.events.rows[i].discarded_ooo);
    }

    sim.seed = 78;
    RunResult c = run_closed_loop(kPlant, {0.4, 0.3}, nominal_channel(), sim);
    CHECK(!bitwise_equal(a.trace, c.trace));
}

TEST_CASE("disabled impairments reduce the channel to the direct loop bitwise") {
    const std::pair<double, double> gain_pairs[] = {
        {0.0, 0.0}, {0.5, 0.0}, {0.2, 0.1}, {1.5, 0.9}};
    for (auto [kp, ki] : gain_pairs) {
        SimConfig sim = short_sim(8.0);
        Trace direct = run_direct_loop(kPlant, {kp, ki}, sim);
        RunResult closed = run_closed_loop(kPlant, {kp, ki}, no_impairments(), sim);
        CHECK(bitwise_equal(direct, closed.trace));
    }
}

TEST_CASE("equivalence also holds with a single tick per period") {
    SimConfig sim = short_sim(5.0);
    sim.tick_divisor = 1;
    PlantParams plant{5.0, 1.5, 1.0}; // L = 10 ticks at tick = Ts = 0.1
    Trace direct = run_direct_loop(plant, {0.3, 0.2}, sim);
    RunResult closed = run_closed_loop(plant, {0.3, 0.2}, no_impairments(), sim);
    CHECK(bitwise_equal(direct, closed.trace));
}

TEST_CASE("sub-period delays still act as a pure one-period transport") {
    // With d_max < Ts every packet arrives before the next control instant,
    // so the loop behaves exactly like the ideal one-period transport and the
    // order filter never discards anything.
    ChannelConfig chan;
    chan.drop_prob = 0.0;
    chan.delay.kind = DelayKind::uniform;
    chan.delay.d_max = 0.05;
    SimConfig sim = short_sim(8.0, 13);
    RunResult closed = run_closed_loop(kPlant, {0.3, 0.2}, chan, sim);
    Trace direct = run_direct_loop(kPlant, {0.3, 0.2}, sim);
    CHECK(bitwise_equal(direct, closed.trace));
    for (const EventRow& row : closed.events.rows) {
        CHECK(!row.discarded_ooo);
        CHECK(!row.dropped);
    }
}

TEST_CASE("direct loop integral action removes steady-state error") {
    SimConfig sim = short_sim(200.0);
    Trace trace = run_direct_loop(kPlant, {0.2, 0.1}, sim);
    REQUIRE(!trace.diverged);
    CHECK(std::abs(trace.rows.back().e) < 1e-3);
}

TEST_CASE("hold-last keeps the controller input when every packet drops") {
    ChannelConfig chan = no_impairments();
    chan.drop_prob = 1.0;
    RunResult result = run_closed_loop(kPlant, {0.5, 0.2}, chan, short_sim(5.0));
    // Nothing ever arrives: controller holds its initial zero input, so the
    // error it acts on is the raw setpoint and u ramps as pure PI on e = 1.
    PiState oracle_state;
    for (std::size_t k = 0; k < result.trace.rows.size(); ++k) {
        const double expected = pi_step(oracle_state, {0.5, 0.2}, 1.0, 0.1);
        CHECK(result.trace.rows[k].u == expected);
    }
    CHECK(result.delivered_sensor_stamps.empty());
}

TEST_CASE("unstable gains divergence is flagged, truncated and penalized") {
    // A proportional gain this large overflows the loop within a couple of
    // dead-time round trips.
    RunResult result = run_closed_loop(kPlant, {1e150, 0.0}, no_impairments(), short_sim(10.0));
    REQUIRE(result.trace.diverged);
    CHECK(result.trace.t_diverged <= 10.0);
    CHECK(!result.trace.rows.empty());
    for (const TraceRow& row : result.trace.rows) {
        CHECK(std::isfinite(row.y));
        CHECK(std::isfinite(row.u));
    }
    const double j = objective(result.trace, {1.0, 1.0});
    CHECK(j >= 1e12);
}

TEST_CASE("sensor stamps consumed by the controller are strictly increasing") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RunResult result = run_closed_loop(kPlant, {0.3, 0.2}, nominal_channel(),
                                           short_sim(10.0, seed));
        for (std::size_t i = 1; i < result.delivered_sensor_stamps.size(); ++i) {
            CHECK(result.delivered_sensor_stamps[i] > result.delivered_sensor_stamps[i - 1]);
        }
    }
}

TEST_CASE("configuration violations name the offending field") {
    SimConfig sim = short_sim();
    sim.horizon = 10.05; // not a multiple of Ts
    try {
        run_direct_loop(kPlant, {0.1, 0.1}, sim);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "sim.horizon");
    }

    sim = short_sim();
    sim.tick_divisor = 0;
    CHECK_THROWS_AS(run_direct_loop(kPlant, {0.1, 0.1}, sim), ConfigError);

    sim = short_sim();
    PlantParams bad = kPlant;
    bad.dead_time = 1.005; // not on the tick grid
    CHECK_THROWS_AS(run_closed_loop(bad, {0.1, 0.1}, no_impairments(), sim), ConfigError);
}
