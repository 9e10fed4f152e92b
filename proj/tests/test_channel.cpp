#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncs/channel.hpp"
#include "ncs/error.hpp"
#include "ncs/rng.hpp"

using namespace ncs;

namespace {

constexpr double kTick = 0.01;
constexpr int kTicksPerPeriod = 10;

ChannelConfig make_cfg(double drop, DelayModel delay) {
    ChannelConfig cfg;
    cfg.drop_prob = drop;
    cfg.delay = delay;
    return cfg;
}

DelayModel constant_delay(double value) {
    DelayModel m;
    m.kind = DelayKind::constant;
    m.value = value;
    m.d_max = value;
    return m;
}

DelayModel uniform_delay(double d_max) {
    DelayModel m;
    m.kind = DelayKind::uniform;
    m.d_max = d_max;
    return m;
}

} // namespace

TEST_CASE("drop probability one swallows everything") {
    Channel chan(make_cfg(1.0, constant_delay(0.0)), kTick, Pcg32(7, 1));
    for (std::uint64_t k = 0; k < 100; ++k) {
        chan.push({k, k * 0.1, 1.0}, k * kTicksPerPeriod);
    }
    CHECK(chan.in_flight_count() == 0);
    for (const ChannelEvent& ev : chan.events()) {
        CHECK(ev.dropped);
        CHECK(!ev.delay.has_value());
    }
}

TEST_CASE("zero drop and zero delay release immediately") {
    Channel chan(make_cfg(0.0, constant_delay(0.0)), kTick, Pcg32(7, 1));
    for (std::uint64_t k = 0; k < 20; ++k) {
        const std::uint64_t now = k * kTicksPerPeriod;
        chan.push({k, k * 0.1, 1.0}, now);
        auto released = chan.tick(now);
        REQUIRE(released.size() == 1);
        CHECK(released[0].seq == k);
        CHECK(*chan.events()[k].delay == 0.0);
    }
}

TEST_CASE("drop rate matches a binomial confidence interval") {
    const double p = 0.3;
    const int n = 10000;
    Channel chan(make_cfg(p, constant_delay(0.0)), kTick, Pcg32(123, 1));
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(n); ++k) {
        chan.push({k, k * 0.1, 0.0}, k * kTicksPerPeriod);
    }
    int dropped = 0;
    for (const ChannelEvent& ev : chan.events()) {
        dropped += ev.dropped ? 1 : 0;
    }
    const double rate = static_cast<double>(dropped) / n;
    const double tol = 3.0 * std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(rate - p) <= tol);
}

TEST_CASE("constant delay releases exactly at t + d") {
    // Oracle: a scalar FIFO with known release ticks.
    const double d = 0.07;
    Channel chan(make_cfg(0.0, constant_delay(d)), kTick, Pcg32(5, 2));
    const auto d_ticks = static_cast<std::uint64_t>(std::llround(d / kTick));
    std::vector<std::uint64_t> expected_release;
    for (std::uint64_t k = 0; k < 30; ++k) {
        const std::uint64_t now = k * kTicksPerPeriod;
        chan.push({k, k * 0.1, 0.0}, now);
        expected_release.push_back(now + d_ticks);
    }
    std::size_t next = 0;
    for (std::uint64_t t = 0; t < 30 * kTicksPerPeriod + 20; ++t) {
        for (const Packet& pkt : chan.tick(t)) {
            REQUIRE(next < expected_release.size());
            CHECK(pkt.seq == next);
            CHECK(t == expected_release[next]);
            ++next;
        }
    }
    CHECK(next == expected_release.size());
}

TEST_CASE("delays are quantized up to the tick") {
    // 0.013 s is between ticks; it must round up to 0.02.
    DelayModel m = constant_delay(0.013);
    Channel chan(make_cfg(0.0, m), kTick, Pcg32(5, 2));
    chan.push({0, 0.0, 0.0}, 0);
    CHECK(*chan.events()[0].delay == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(chan.tick(1).empty());
    CHECK(chan.tick(2).size() == 1);
}

TEST_CASE("uniform delays respect the bound and the mean") {
    const double d_max = 0.3;
    const int n = 10000;
    Channel chan(make_cfg(0.0, uniform_delay(d_max)), kTick, Pcg32(99, 1));
    for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(n); ++k) {
        chan.push({k, k * 0.1, 0.0}, k * kTicksPerPeriod);
    }
    double sum = 0.0;
    for (const ChannelEvent& ev : chan.events()) {
        REQUIRE(ev.delay.has_value());
        const double d = *ev.delay;
        CHECK(d >= 0.0);
        CHECK(d <= d_max + 1e-12);
        const double ratio = d / kTick;
        CHECK(std::abs(ratio - std::round(ratio)) <= 1e-9);
        sum += d;
    }
    // Quantize-up adds at most one tick of bias on top of the sampling noise.
    const double sigma = (d_max / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum / n - d_max / 2.0) <= 3.0 * sigma + kTick);
}

TEST_CASE("truncated exponential delays stay inside [0, d_max]") {
    DelayModel m;
    m.kind = DelayKind::truncated_exponential;
    m.mean = 0.08;
    m.d_max = 0.3;
    Channel chan(make_cfg(0.0, m), kTick, Pcg32(4, 1));
    for (std::uint64_t k = 0; k < 5000; ++k) {
        chan.push({k, k * 0.1, 0.0}, k * kTicksPerPeriod);
    }
    for (const ChannelEvent& ev : chan.events()) {
        CHECK(*ev.delay >= 0.0);
        CHECK(*ev.delay <= m.d_max + 1e-12);
    }
}

TEST_CASE("identical seeds give identical drop and delay realizations") {
    auto run = [](std::uint64_t seed) {
        Channel chan(make_cfg(0.25, uniform_delay(0.3)), kTick, Pcg32(seed, 1));
        for (std::uint64_t k = 0; k < 500; ++k) {
            chan.push({k, k * 0.1, 0.0}, k * kTicksPerPeriod);
        }
        return chan.events();
    };
    const auto a = run(42);
    const auto b = run(42);
    const auto c = run(43);
    REQUIRE(a.size() == b.size());
    bool any_difference_from_c = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].dropped == b[i].dropped);
        CHECK(a[i].delay == b[i].delay);
        if (a[i].dropped != c[i].dropped || a[i].delay != c[i].delay) {
            any_difference_from_c = true;
        }
    }
    CHECK(any_difference_from_c);
}

TEST_CASE("pushing out of sequence is a caller bug") {
    Channel chan(make_cfg(0.0, constant_delay(0.0)), kTick, Pcg32(1, 1));
    chan.push({0, 0.0, 0.0}, 0);
    CHECK_THROWS_AS(chan.push({0, 0.1, 0.0}, 10), std::logic_error);
    CHECK_THROWS_AS(chan.push({5, 0.1, 0.0}, 10), std::logic_error);
}

TEST_CASE("order filter passes an already ordered stream untouched") {
    OooFilter filter(1000);
    for (int k = 1; k <= 3; ++k) {
        filter.insert({static_cast<std::uint64_t>(k), static_cast<double>(k), 0.0});
        OooEmit em = filter.emit();
        REQUIRE(em.passed.has_value());
        CHECK(em.passed->stamp == k);
        CHECK(em.discarded.empty());
    }
}

TEST_CASE("order filter drops the late straggler") {
    // Arrival order by stamp [1, 3, 2, 4], one per period -> passes [1, 3, 4].
    OooFilter filter(1000);
    std::vector<double> passed;
    int discarded = 0;
    for (double stamp : {1.0, 3.0, 2.0, 4.0}) {
        filter.insert({static_cast<std::uint64_t>(stamp), stamp, 0.0});
        OooEmit em = filter.emit();
        if (em.passed) {
            passed.push_back(em.passed->stamp);
        }
        discarded += static_cast<int>(em.discarded.size());
    }
    CHECK(passed == std::vector<double>{1.0, 3.0, 4.0});
    CHECK(discarded == 1);
}

TEST_CASE("order filter keeps only the newest of a same-period burst") {
    OooFilter filter(1000);
    filter.insert({5, 5.0, 0.0});
    filter.insert({7, 7.0, 0.0});
    OooEmit em = filter.emit();
    REQUIRE(em.passed.has_value());
    CHECK(em.passed->stamp == 7.0);
    REQUIRE(em.discarded.size() == 1);
    CHECK(em.discarded[0].stamp == 5.0);
}

TEST_CASE("order filter evicts the oldest stamp beyond capacity") {
    OooFilter filter(2);
    CHECK(!filter.insert({0, 3.0, 0.0}).has_value());
    CHECK(!filter.insert({1, 1.0, 0.0}).has_value());
    auto evicted = filter.insert({2, 2.0, 0.0});
    REQUIRE(evicted.has_value());
    CHECK(evicted->stamp == 1.0);
    OooEmit em = filter.emit();
    REQUIRE(em.passed.has_value());
    CHECK(em.passed->stamp == 3.0);
}

TEST_CASE("passed stamps are strictly increasing under random arrivals") {
    Pcg32 rng(2024, 9);
    OooFilter filter(1000);
    double last = -1.0;
    std::uint64_t seq = 0;
    for (int period = 0; period < 2000; ++period) {
        const int arrivals = static_cast<int>(rng.next_below(3));
        for (int i = 0; i < arrivals; ++i) {
            // Stamps jittered around the period index to force disorder.
            const double stamp = period * 0.1 - 0.3 * rng.next_double();
            filter.insert({seq++, stamp, 0.0});
        }
        OooEmit em = filter.emit();
        if (em.passed) {
            CHECK(em.passed->stamp > last);
            last = em.passed->stamp;
        }
        for (const Packet& d : em.discarded) {
            CHECK(d.stamp <= last);
        }
    }
}
