#pragma once

namespace ncs {

/// Parallel PI controller C(s) = Kp + Ki/s. No derivative term and no
/// saturation or anti-windup: actuator effort is penalized by the tuning
/// objective instead.
struct PiGains {
    double kp = 0.0;
    double ki = 0.0;
};

struct PiState {
    double integral_accum = 0.0; // backward-Euler accumulated integral of e
    double last_input = 0.0;     // last measurement actually received
};

/// One control-period update. Backward-Euler integration, so for a constant
/// error e0 the output is exactly kp*e0 + ki*e0*k*ts after k steps.
inline double pi_step(PiState& state, const PiGains& gains, double error, double ts) {
    state.integral_accum += error * ts;
    return gains.kp * error + gains.ki * state.integral_accum;
}

} // namespace ncs
