#include "ncs/plant.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "ncs/error.hpp"

namespace ncs {

namespace {

bool near_integer_multiple(double value, double quantum, long long& count) {
    const double ratio = value / quantum;
    const double rounded = std::round(ratio);
    count = static_cast<long long>(rounded);
    return std::abs(ratio - rounded) <= 1e-9 * std::max(1.0, std::abs(ratio));
}

} // namespace

std::size_t dead_time_slots(double dead_time, double tick) {
    long long n = 0;
    if (!near_integer_multiple(dead_time, tick, n) || n < 0) {
        throw ConfigError("plant.L", "dead time must be a non-negative integer multiple of the tick");
    }
    return static_cast<std::size_t>(n);
}

Plant::Plant(const PlantParams& params, double tick) : params_(params), tick_(tick) {
    if (!(tick > 0.0) || !std::isfinite(tick)) {
        throw ConfigError("sim.tick", "tick must be positive and finite");
    }
    if (!(params.time_constant > 0.0) || !std::isfinite(params.time_constant)) {
        throw ConfigError("plant.T", "time constant must be positive and finite");
    }
    if (!std::isfinite(params.gain)) {
        throw ConfigError("plant.K", "gain must be finite");
    }
    if (!(params.dead_time >= 0.0) || !std::isfinite(params.dead_time)) {
        throw ConfigError("plant.L", "dead time must be non-negative and finite");
    }
    delay_line_.assign(dead_time_slots(params.dead_time, tick), 0.0);
}

void Plant::step(double u) {
    assert(std::isfinite(u));
    double u_delayed = u;
    if (!delay_line_.empty()) {
        u_delayed = delay_line_[head_];
        delay_line_[head_] = u;
        head_ = (head_ + 1) % delay_line_.size();
    }

    // dx/dt = (K * u_delayed - x) / T, u_delayed held constant over the tick.
    const double k_gain = params_.gain;
    const double inv_t = 1.0 / params_.time_constant;
    const double dt = tick_;
    const double drive = k_gain * u_delayed;

    const double k1 = (drive - x_) * inv_t;
    const double k2 = (drive - (x_ + 0.5 * dt * k1)) * inv_t;
    const double k3 = (drive - (x_ + 0.5 * dt * k2)) * inv_t;
    const double k4 = (drive - (x_ + dt * k3)) * inv_t;
    x_ += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    ++ticks_;
}

double foptd_step_response(const PlantParams& params, double t) {
    if (t <= params.dead_time) {
        return 0.0;
    }
    return params.gain * (1.0 - std::exp(-(t - params.dead_time) / params.time_constant));
}

} // namespace ncs
