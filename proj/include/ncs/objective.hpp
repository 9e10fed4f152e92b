#pragma once

#include "ncs/sim.hpp"

namespace ncs {

/// Weighted sum of time-multiplied absolute error (ITAE) and squared
/// controller output (ISCO); the second term keeps actuator effort bounded.
struct ObjectiveWeights {
    double w1 = 1.0; // ITAE weight
    double w2 = 1.0; // ISCO weight
};

void validate_weights(const ObjectiveWeights& w);

/// J = sum_k [w1 * t_k * |e_k| + w2 * u_k^2] * Ts, left-rectangle over the
/// horizon (the final sample is excluded as the right endpoint). Diverged
/// traces return the penalty 1e12 * (1 + horizon - t_diverged) so earlier
/// blow-ups cost more. Throws ConfigError on an empty trace.
double objective(const Trace& trace, const ObjectiveWeights& w);

} // namespace ncs
