#include "ncs/csv.hpp"

#include <charconv>
#include <fstream>

#include "ncs/error.hpp"

namespace ncs {

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("output", "cannot write " + path);
    }
    return out;
}

} // namespace

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream out = open_out(path);
    out << "t,r,y,u,e\n";
    for (const TraceRow& row : trace.rows) {
        out << format_double(row.t) << ',' << format_double(row.r) << ','
            << format_double(row.y) << ',' << format_double(row.u) << ','
            << format_double(row.e) << '\n';
    }
}

void write_events_csv(const std::string& path, const EventLog& log) {
    std::ofstream out = open_out(path);
    out << "seq,channel,t_send,delay,dropped,discarded_ooo\n";
    for (const EventRow& row : log.rows) {
        out << row.seq << ',' << channel_id_name(row.channel) << ','
            << format_double(row.t_send) << ',';
        if (row.delay) {
            out << format_double(*row.delay);
        }
        out << ',' << (row.dropped ? '1' : '0') << ',' << (row.discarded_ooo ? '1' : '0')
            << '\n';
    }
}

void write_history_csv(const std::string& path, const std::vector<GenerationStats>& history) {
    std::ofstream out = open_out(path);
    out << "generation,best_j,mean_j\n";
    for (std::size_t g = 0; g < history.size(); ++g) {
        out << g << ',' << format_double(history[g].best_j) << ','
            << format_double(history[g].mean_j) << '\n';
    }
}

} // namespace ncs
