#include "ncs/channel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncs/error.hpp"

namespace ncs {

namespace {

std::uint64_t quantize_up_ticks(double seconds, double tick) {
    if (seconds <= 0.0) {
        return 0;
    }
    const double ratio = seconds / tick - 1e-9;
    return static_cast<std::uint64_t>(std::ceil(std::max(0.0, ratio)));
}

} // namespace

Channel::Channel(const ChannelConfig& cfg, double tick, Pcg32 rng)
    : cfg_(cfg), tick_(tick), rng_(rng) {
    if (!(cfg.drop_prob >= 0.0 && cfg.drop_prob <= 1.0)) {
        throw ConfigError("channel.drop_prob", "must be in [0, 1]");
    }
    if (!(cfg.delay.d_max >= 0.0) || !std::isfinite(cfg.delay.d_max)) {
        throw ConfigError("channel.delay.d_max", "must be non-negative and finite");
    }
    if (cfg.delay.kind == DelayKind::constant &&
        (cfg.delay.value < 0.0 || cfg.delay.value > cfg.delay.d_max)) {
        throw ConfigError("channel.delay.value", "constant delay must lie in [0, d_max]");
    }
    if (cfg.delay.kind == DelayKind::truncated_exponential && !(cfg.delay.mean > 0.0)) {
        throw ConfigError("channel.delay.mean", "exponential mean must be positive");
    }
    if (cfg.ooo_buffer_cap < 1) {
        throw ConfigError("channel.ooo_buffer_cap", "must be at least 1");
    }
    if (!(tick > 0.0)) {
        throw ConfigError("sim.tick", "tick must be positive");
    }
    max_delay_ticks_ = quantize_up_ticks(cfg.delay.d_max, tick);
}

double Channel::draw_delay() {
    switch (cfg_.delay.kind) {
    case DelayKind::constant:
        return cfg_.delay.value;
    case DelayKind::uniform:
        return rng_.next_double() * cfg_.delay.d_max;
    case DelayKind::truncated_exponential: {
        // Inverse CDF of exp(mean) conditioned on [0, d_max]; single draw,
        // exact truncation.
        const double mean = cfg_.delay.mean;
        const double mass = 1.0 - std::exp(-cfg_.delay.d_max / mean);
        return -mean * std::log(1.0 - rng_.next_double() * mass);
    }
    }
    return 0.0;
}

void Channel::push(const Packet& pkt, std::uint64_t now_tick) {
    if (pkt.seq != events_.size()) {
        throw std::logic_error("channel push out of sequence");
    }

    ChannelEvent ev;
    ev.seq = pkt.seq;
    ev.t_send = pkt.stamp;

    if (rng_.next_double() < cfg_.drop_prob) {
        ev.dropped = true;
        events_.push_back(ev);
        return;
    }

    std::uint64_t delay_ticks = quantize_up_ticks(draw_delay(), tick_);
    delay_ticks = std::min(delay_ticks, max_delay_ticks_);
    ev.delay = static_cast<double>(delay_ticks) * tick_;
    events_.push_back(ev);
    in_flight_.push_back({pkt, now_tick + delay_ticks});
}

std::vector<Packet> Channel::tick(std::uint64_t now_tick) {
    std::vector<Packet> released;
    auto due = [&](const InFlight& f) { return f.release_tick <= now_tick; };
    for (const auto& f : in_flight_) {
        if (due(f)) {
            released.push_back(f.pkt);
        }
    }
    if (!released.empty()) {
        in_flight_.erase(std::remove_if(in_flight_.begin(), in_flight_.end(), due),
                         in_flight_.end());
    }
    return released;
}

void Channel::mark_discarded(std::uint64_t seq) {
    if (seq < events_.size()) {
        events_[seq].discarded_ooo = true;
    }
}

OooFilter::OooFilter(int capacity)
    : cap_(static_cast<std::size_t>(std::max(1, capacity))),
      last_passed_(-std::numeric_limits<double>::infinity()) {}

std::optional<Packet> OooFilter::insert(const Packet& pkt) {
    // One packet per control period per sender makes stamps unique.
    assert(std::none_of(buffer_.begin(), buffer_.end(),
                        [&](const Packet& p) { return p.stamp == pkt.stamp; }));
    std::optional<Packet> evicted;
    if (buffer_.size() >= cap_) {
        auto oldest = std::min_element(buffer_.begin(), buffer_.end(),
                                       [](const Packet& a, const Packet& b) {
                                           return a.stamp < b.stamp;
                                       });
        evicted = *oldest;
        buffer_.erase(oldest);
    }
    buffer_.push_back(pkt);
    return evicted;
}

OooEmit OooFilter::emit() {
    OooEmit out;
    if (buffer_.empty()) {
        return out;
    }
    auto newest = std::max_element(buffer_.begin(), buffer_.end(),
                                   [](const Packet& a, const Packet& b) {
                                       return a.stamp < b.stamp;
                                   });
    const bool pass = newest->stamp > last_passed_;
    for (auto it = buffer_.begin(); it != buffer_.end(); ++it) {
        if (pass && it == newest) {
            continue;
        }
        out.discarded.push_back(*it);
    }
    if (pass) {
        out.passed = *newest;
        last_passed_ = newest->stamp;
    }
    buffer_.clear();
    return out;
}

} // namespace ncs
