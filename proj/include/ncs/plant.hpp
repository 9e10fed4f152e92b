#pragma once

#include <cstdint>
#include <vector>

namespace ncs {

/// First-order-plus-time-delay process K * e^{-L s} / (T s + 1).
struct PlantParams {
    double gain = 5.0;          // K, dimensionless
    double time_constant = 1.5; // T, seconds
    double dead_time = 1.0;     // L, seconds
};

/// Continuous FOPTD plant advanced at a fixed tick. The dead time is realized
/// exactly as a ring buffer of round(L/tick) input samples, so the output is
/// identically zero until the delay line has filled; no Pade approximation.
/// The lag is integrated with classical RK4, input held constant over a tick.
class Plant {
public:
    /// Throws ConfigError unless T > 0, K finite, L >= 0 and L is an integer
    /// multiple of tick.
    Plant(const PlantParams& params, double tick);

    /// Advance one tick with control input u applied at the plant boundary.
    void step(double u);

    double output() const { return x_; }
    double time() const { return static_cast<double>(ticks_) * tick_; }
    const PlantParams& params() const { return params_; }
    double tick() const { return tick_; }

private:
    PlantParams params_;
    double tick_ = 0.0;
    double x_ = 0.0;
    std::vector<double> delay_line_; // round(L/tick) samples, zero-initialized
    std::size_t head_ = 0;
    std::uint64_t ticks_ = 0;
};

/// Closed-form unit-step response of the FOPTD plant: 0 for t <= L, then
/// K * (1 - e^{-(t-L)/T}). Test oracle for the integrated plant.
double foptd_step_response(const PlantParams& params, double t);

/// Number of delay-line slots for a dead time L at the given tick. Throws
/// ConfigError when L is not an integer multiple of tick.
std::size_t dead_time_slots(double dead_time, double tick);

} // namespace ncs
