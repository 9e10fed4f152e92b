#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncs/ga.hpp"
#include "ncs/sim.hpp"

namespace ncs {

/// Shortest decimal form that parses back to the identical double, so the
/// determinism guarantees survive the file boundary.
std::string format_double(double value);

/// Columns t,r,y,u,e; one row per control period.
void write_trace_csv(const std::string& path, const Trace& trace);

/// Columns seq,channel,t_send,delay,dropped,discarded_ooo. The delay field is
/// empty for dropped packets; booleans are 0/1.
void write_events_csv(const std::string& path, const EventLog& log);

/// Columns generation,best_j,mean_j; generation 0 is the initial population.
void write_history_csv(const std::string& path, const std::vector<GenerationStats>& history);

} // namespace ncs
