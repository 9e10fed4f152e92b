#include "ncs/objective.hpp"

#include <cmath>

#include "ncs/error.hpp"

namespace ncs {

void validate_weights(const ObjectiveWeights& w) {
    if (!(w.w1 >= 0.0) || !std::isfinite(w.w1)) {
        throw ConfigError("objective.w1", "must be non-negative and finite");
    }
    if (!(w.w2 >= 0.0) || !std::isfinite(w.w2)) {
        throw ConfigError("objective.w2", "must be non-negative and finite");
    }
    if (!(w.w1 + w.w2 > 0.0)) {
        throw ConfigError("objective.w1", "w1 + w2 must be positive");
    }
}

double objective(const Trace& trace, const ObjectiveWeights& w) {
    validate_weights(w);
    if (trace.diverged) {
        return 1e12 * (1.0 + trace.horizon - trace.t_diverged);
    }
    if (trace.rows.empty()) {
        throw ConfigError("trace", "objective of an empty trace");
    }
    const double ts = trace.sample_period;
    double cost = 0.0;
    for (std::size_t k = 0; k + 1 < trace.rows.size(); ++k) {
        const TraceRow& row = trace.rows[k];
        cost += (w.w1 * row.t * std::abs(row.e) + w.w2 * row.u * row.u) * ts;
    }
    return cost;
}

} // namespace ncs
