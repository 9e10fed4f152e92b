#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ncs::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitRtFailure = 3;

struct Options {
    std::optional<std::string> config_path; // defaults apply when absent
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<std::string> role; // rt only: "plant" | "controller"
};

/// Writes trace.csv, events.csv and effective_config.json to out_dir.
int run_simulate(const Options& opts);

/// Writes gains.json, history.csv and effective_config.json to out_dir.
int run_tune(const Options& opts);

/// Runs one RT node; writes trace.csv (+ events.csv for the plant role) and
/// effective_config.json to out_dir.
int run_rt(const Options& opts);

} // namespace ncs::cli
