#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ncs/channel.hpp"
#include "ncs/controller.hpp"
#include "ncs/plant.hpp"

namespace ncs {

struct SimConfig {
    double control_period = 0.1; // Ts, seconds
    int tick_divisor = 10;       // engine ticks per control period
    double horizon = 30.0;       // seconds, integer multiple of Ts
    double setpoint = 1.0;
    std::uint64_t seed = 0;

    double tick() const { return control_period / tick_divisor; }
};

/// Throws ConfigError on any violated invariant; returns the period count.
std::uint64_t validate_sim_config(const SimConfig& sim);

struct TraceRow {
    double t = 0.0;
    double r = 0.0; // setpoint
    double y = 0.0; // plant output
    double u = 0.0; // controller output
    double e = 0.0; // r - y
};

/// Loop signals sampled once per control period. A diverged run is truncated
/// at the first non-finite sample; no NaN ever lands in a row.
struct Trace {
    std::vector<TraceRow> rows;
    double sample_period = 0.0;
    double horizon = 0.0;
    bool diverged = false;
    double t_diverged = 0.0;
};

enum class ChannelId { sensor_to_ctrl, ctrl_to_act };

const char* channel_id_name(ChannelId id);

struct EventRow {
    std::uint64_t seq = 0;
    ChannelId channel = ChannelId::sensor_to_ctrl;
    double t_send = 0.0;
    std::optional<double> delay; // empty when dropped
    bool dropped = false;
    bool discarded_ooo = false;
};

struct EventLog {
    std::vector<EventRow> rows;
};

struct RunResult {
    Trace trace;
    EventLog events;
    // Stamps actually consumed at each end, in consumption order. The order
    // filter guarantees these are strictly increasing.
    std::vector<double> delivered_sensor_stamps;
    std::vector<double> delivered_control_stamps;
};

/// Close the PI loop around the plant through two independent channel
/// instances (sensor->controller and controller->actuator) with RNG streams
/// derived from sim.seed. Fully deterministic for identical inputs and seed.
RunResult run_closed_loop(const PlantParams& plant, const PiGains& gains,
                          const ChannelConfig& chan_cfg, const SimConfig& sim);

/// Reference loop with no channel: both links behave as ideal one-period
/// transports, mirroring the channel's minimum latency so that a
/// zero-impairment closed loop matches this trace bitwise.
Trace run_direct_loop(const PlantParams& plant, const PiGains& gains, const SimConfig& sim);

} // namespace ncs
