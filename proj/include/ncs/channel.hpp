#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncs/rng.hpp"

namespace ncs {

/// A sequence-numbered, time-stamped scalar sample crossing the network.
struct Packet {
    std::uint64_t seq = 0;
    double stamp = 0.0; // send time, seconds
    double value = 0.0;
};

enum class DelayKind {
    constant,
    uniform,              // uniform on [0, d_max]
    truncated_exponential // exponential(mean) conditioned on [0, d_max]
};

struct DelayModel {
    DelayKind kind = DelayKind::uniform;
    double value = 0.0; // constant kind only
    double mean = 0.1;  // truncated_exponential kind only
    double d_max = 0.3; // hard upper bound, seconds
};

struct ChannelConfig {
    double drop_prob = 0.1;
    DelayModel delay;
    int ooo_buffer_cap = 1000;
};

/// Per-packet network fate, one record per pushed seq. `delay` is empty for
/// dropped packets; `discarded_ooo` is set later if the order filter rejects
/// the packet after delivery.
struct ChannelEvent {
    std::uint64_t seq = 0;
    double t_send = 0.0;
    std::optional<double> delay;
    bool dropped = false;
    bool discarded_ooo = false;
};

/// Lossy, delaying packet pipe. Drop is decided at push time; surviving
/// packets get a delay drawn from the configured model, rounded UP to the
/// tick, and are held in flight until their release tick. Time is tracked in
/// integer ticks so release comparisons are exact.
class Channel {
public:
    /// `tick` is the engine step in seconds (delay quantization unit).
    Channel(const ChannelConfig& cfg, double tick, Pcg32 rng);

    /// Offer a packet at `now_tick`. Throws std::logic_error when seq is not
    /// the next in sequence (duplicate or gap - a caller bug).
    void push(const Packet& pkt, std::uint64_t now_tick);

    /// Release every in-flight packet whose release tick has arrived, in push
    /// order. Multiple packets may release in one tick once d_max exceeds the
    /// sampling period; that is how out-of-order arrival manifests.
    std::vector<Packet> tick(std::uint64_t now_tick);

    /// Mark a delivered packet as discarded by the downstream order filter.
    void mark_discarded(std::uint64_t seq);

    const std::vector<ChannelEvent>& events() const { return events_; }
    std::size_t in_flight_count() const { return in_flight_.size(); }
    double tick_seconds() const { return tick_; }

private:
    double draw_delay();

    struct InFlight {
        Packet pkt;
        std::uint64_t release_tick;
    };

    ChannelConfig cfg_;
    double tick_;
    Pcg32 rng_;
    std::uint64_t max_delay_ticks_ = 0;
    std::vector<InFlight> in_flight_;
    std::vector<ChannelEvent> events_;
};

/// One emit per control period.
struct OooEmit {
    std::optional<Packet> passed;
    std::vector<Packet> discarded;
};

/// Out-of-order packet removal: a bounded store of time-stamped arrivals that
/// passes through only the newest packet, and only when it is newer than
/// everything passed before. Stale packets never reach the consumer.
class OooFilter {
public:
    explicit OooFilter(int capacity);

    /// Insert one arrival. When the buffer is full the oldest stamp is
    /// evicted and returned so the caller can log it as discarded.
    std::optional<Packet> insert(const Packet& pkt);

    /// Consume the buffer: pass the highest-stamped packet if it is strictly
    /// newer than the last one passed, discard everything else.
    OooEmit emit();

    double last_passed_stamp() const { return last_passed_; }
    std::size_t buffered() const { return buffer_.size(); }

private:
    std::size_t cap_;
    std::vector<Packet> buffer_;
    double last_passed_;
};

} // namespace ncs
