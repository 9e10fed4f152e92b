#include "ncs/sim.hpp"

#include <cmath>

#include "ncs/error.hpp"
#include "ncs/rng.hpp"

namespace ncs {

const char* channel_id_name(ChannelId id) {
    return id == ChannelId::sensor_to_ctrl ? "sensor_to_ctrl" : "ctrl_to_act";
}

std::uint64_t validate_sim_config(const SimConfig& sim) {
    if (!(sim.control_period > 0.0) || !std::isfinite(sim.control_period)) {
        throw ConfigError("sim.Ts", "control period must be positive and finite");
    }
    if (sim.tick_divisor < 1) {
        throw ConfigError("sim.tick_divisor", "must be at least 1");
    }
    if (!(sim.horizon >= sim.control_period) || !std::isfinite(sim.horizon)) {
        throw ConfigError("sim.horizon", "must be at least one control period");
    }
    if (!std::isfinite(sim.setpoint)) {
        throw ConfigError("sim.setpoint", "must be finite");
    }
    const double ratio = sim.horizon / sim.control_period;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ConfigError("sim.horizon", "must be an integer multiple of the control period");
    }
    return static_cast<std::uint64_t>(rounded);
}

RunResult run_closed_loop(const PlantParams& plant, const PiGains& gains,
                          const ChannelConfig& chan_cfg, const SimConfig& sim) {
    const std::uint64_t n_periods = validate_sim_config(sim);
    const double ts = sim.control_period;
    const double tick = sim.tick();
    const std::uint64_t ticks_per_period = static_cast<std::uint64_t>(sim.tick_divisor);
    const std::uint64_t total_ticks = n_periods * ticks_per_period;

    Plant process(plant, tick);
    Channel chan_sc(chan_cfg, tick, Pcg32(sim.seed, rng_stream::kSensorChannel));
    Channel chan_ca(chan_cfg, tick, Pcg32(sim.seed, rng_stream::kControlChannel));
    OooFilter filter_sc(chan_cfg.ooo_buffer_cap);
    OooFilter filter_ca(chan_cfg.ooo_buffer_cap);

    PiState ctrl;
    double u_applied = 0.0; // actuator zero-order hold

    RunResult result;
    result.trace.sample_period = ts;
    result.trace.horizon = sim.horizon;
    result.trace.rows.reserve(n_periods + 1);

    for (std::uint64_t j = 0; j <= total_ticks; ++j) {
        // Deliver due packets into each receiver's order buffer. The scan runs
        // before any push at this instant, so even a zero-delay packet is
        // consumable no earlier than the next period.
        for (const Packet& pkt : chan_sc.tick(j)) {
            if (auto evicted = filter_sc.insert(pkt)) {
                chan_sc.mark_discarded(evicted->seq);
            }
        }
        for (const Packet& pkt : chan_ca.tick(j)) {
            if (auto evicted = filter_ca.insert(pkt)) {
                chan_ca.mark_discarded(evicted->seq);
            }
        }

        if (j % ticks_per_period == 0) {
            const std::uint64_t k = j / ticks_per_period;
            const double tk = static_cast<double>(k) * ts;

            // Actuator: hold the newest order-filtered control packet.
            OooEmit act = filter_ca.emit();
            for (const Packet& pkt : act.discarded) {
                chan_ca.mark_discarded(pkt.seq);
            }
            if (act.passed) {
                u_applied = act.passed->value;
                result.delivered_control_stamps.push_back(act.passed->stamp);
            }

            const double yk = process.output();
            if (!std::isfinite(yk)) {
                result.trace.diverged = true;
                result.trace.t_diverged = tk;
                break;
            }
            chan_sc.push({k, tk, yk}, j);

            // Controller: newest order-filtered measurement, hold-last when
            // nothing arrived this period.
            OooEmit meas = filter_sc.emit();
            for (const Packet& pkt : meas.discarded) {
                chan_sc.mark_discarded(pkt.seq);
            }
            if (meas.passed) {
                ctrl.last_input = meas.passed->value;
                result.delivered_sensor_stamps.push_back(meas.passed->stamp);
            }
            const double e_ctrl = sim.setpoint - ctrl.last_input;
            const double uk = pi_step(ctrl, gains, e_ctrl, ts);
            if (!std::isfinite(uk)) {
                result.trace.diverged = true;
                result.trace.t_diverged = tk;
                break;
            }
            chan_ca.push({k, tk, uk}, j);

            result.trace.rows.push_back({tk, sim.setpoint, yk, uk, sim.setpoint - yk});
        }

        if (j < total_ticks) {
            process.step(u_applied);
        }
    }

    for (const ChannelEvent& ev : chan_sc.events()) {
        result.events.rows.push_back(
            {ev.seq, ChannelId::sensor_to_ctrl, ev.t_send, ev.delay, ev.dropped, ev.discarded_ooo});
    }
    for (const ChannelEvent& ev : chan_ca.events()) {
        result.events.rows.push_back(
            {ev.seq, ChannelId::ctrl_to_act, ev.t_send, ev.delay, ev.dropped, ev.discarded_ooo});
    }
    return result;
}

Trace run_direct_loop(const PlantParams& plant, const PiGains& gains, const SimConfig& sim) {
    const std::uint64_t n_periods = validate_sim_config(sim);
    const double ts = sim.control_period;
    const double tick = sim.tick();

    Plant process(plant, tick);
    PiState ctrl;
    double u_applied = 0.0;
    double prev_y = 0.0;
    double prev_u = 0.0;

    Trace trace;
    trace.sample_period = ts;
    trace.horizon = sim.horizon;
    trace.rows.reserve(n_periods + 1);

    for (std::uint64_t k = 0; k <= n_periods; ++k) {
        const double tk = static_cast<double>(k) * ts;
        if (k > 0) {
            u_applied = prev_u;        // control from period k-1 arrives now
            ctrl.last_input = prev_y;  // measurement from period k-1 arrives now
        }

        const double yk = process.output();
        if (!std::isfinite(yk)) {
            trace.diverged = true;
            trace.t_diverged = tk;
            break;
        }
        const double e_ctrl = sim.setpoint - ctrl.last_input;
        const double uk = pi_step(ctrl, gains, e_ctrl, ts);
        if (!std::isfinite(uk)) {
            trace.diverged = true;
            trace.t_diverged = tk;
            break;
        }
        trace.rows.push_back({tk, sim.setpoint, yk, uk, sim.setpoint - yk});

        prev_y = yk;
        prev_u = uk;
        if (k < n_periods) {
            for (int i = 0; i < sim.tick_divisor; ++i) {
                process.step(u_applied);
            }
        }
    }
    return trace;
}

} // namespace ncs
