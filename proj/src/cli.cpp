#include "ncs/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ncs/config.hpp"
#include "ncs/csv.hpp"
#include "ncs/error.hpp"
#include "ncs/ga.hpp"
#include "ncs/node.hpp"
#include "ncs/objective.hpp"
#include "ncs/rng.hpp"
#include "ncs/sim.hpp"

namespace ncs::cli {

namespace {

namespace fs = std::filesystem;

RunConfig load(const Options& opts) {
    if (opts.config_path) {
        return load_run_config_file(*opts.config_path, opts.seed);
    }
    return load_run_config(nlohmann::json::object(), opts.seed);
}

fs::path prepare_out_dir(const Options& opts) {
    fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    return dir;
}

void write_effective_config(const fs::path& dir, const RunConfig& cfg) {
    std::ofstream out(dir / "effective_config.json", std::ios::binary);
    if (!out) {
        throw ConfigError("output", "cannot write " + (dir / "effective_config.json").string());
    }
    out << effective_config_json(cfg).dump(2) << '\n';
}

int config_failure(const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
}

} // namespace

int run_simulate(const Options& opts) {
    RunConfig cfg;
    try {
        cfg = load(opts);
    } catch (const ConfigError& e) {
        return config_failure(e);
    }

    const fs::path dir = prepare_out_dir(opts);
    RunResult result = run_closed_loop(cfg.plant, cfg.gains, cfg.channel, cfg.sim);
    write_trace_csv((dir / "trace.csv").string(), result.trace);
    write_events_csv((dir / "events.csv").string(), result.events);
    write_effective_config(dir, cfg);

    if (result.trace.diverged) {
        std::fprintf(stderr, "loop diverged at t=%s s; trace truncated\n",
                     format_double(result.trace.t_diverged).c_str());
        return kExitDiverged;
    }
    std::printf("simulate: %zu samples, J=%s\n", result.trace.rows.size(),
                format_double(objective(result.trace, cfg.weights)).c_str());
    return kExitOk;
}

int run_tune(const Options& opts) {
    RunConfig cfg;
    try {
        cfg = load(opts);
    } catch (const ConfigError& e) {
        return config_failure(e);
    }

    const fs::path dir = prepare_out_dir(opts);
    TuneResult tuned = ga_tune(cfg.plant, cfg.channel, cfg.sim, cfg.weights, cfg.ga);

    // Honest out-of-sample score on seeds the tuner never saw.
    const std::vector<std::uint64_t> fresh =
        derive_seeds(cfg.ga.master_seed, rng_stream::kFreshEvalSeeds, 10);
    double oos_total = 0.0;
    int oos_diverged = 0;
    SimConfig oos_sim = cfg.sim;
    for (std::uint64_t seed : fresh) {
        oos_sim.seed = seed;
        const Trace trace = run_closed_loop(cfg.plant, tuned.best_gains, cfg.channel, oos_sim).trace;
        if (trace.diverged) {
            ++oos_diverged;
        }
        oos_total += objective(trace, cfg.weights);
    }

    nlohmann::json gains_doc{
        {"gains", {{"kp", tuned.best_gains.kp}, {"ki", tuned.best_gains.ki}}},
        {"in_sample_j", tuned.best_j},
        {"out_of_sample_j", oos_total / static_cast<double>(fresh.size())},
        {"out_of_sample_diverged", oos_diverged},
        {"eval_seeds", tuned.eval_seeds},
        {"fresh_seeds", fresh},
    };
    std::ofstream out(dir / "gains.json", std::ios::binary);
    out << gains_doc.dump(2) << '\n';
    write_history_csv((dir / "history.csv").string(), tuned.history);
    write_effective_config(dir, cfg);

    std::printf("tune: best kp=%s ki=%s, in-sample J=%s, out-of-sample J=%s\n",
                format_double(tuned.best_gains.kp).c_str(),
                format_double(tuned.best_gains.ki).c_str(),
                format_double(tuned.best_j).c_str(),
                format_double(gains_doc["out_of_sample_j"].get<double>()).c_str());
    return kExitOk;
}

int run_rt(const Options& opts) {
    RunConfig cfg;
    try {
        cfg = load(opts);
        if (opts.role) {
            if (*opts.role == "plant") {
                cfg.rt_role = NodeRole::plant_master;
            } else if (*opts.role == "controller") {
                cfg.rt_role = NodeRole::controller_slave;
            } else {
                throw ConfigError("--role", "expected plant | controller");
            }
        }
    } catch (const ConfigError& e) {
        return config_failure(e);
    }

    const fs::path dir = prepare_out_dir(opts);
    write_effective_config(dir, cfg);
    try {
        if (cfg.rt_role == NodeRole::plant_master) {
            PlantNodeResult result = run_plant_node(cfg.node_config());
            write_trace_csv((dir / "trace.csv").string(), result.trace);
            write_events_csv((dir / "events.csv").string(), result.events);
            std::printf("rt plant: %zu samples, %d control misses\n",
                        result.trace.rows.size(), result.control_misses);
            if (result.trace.diverged) {
                std::fprintf(stderr, "loop diverged at t=%s s; trace truncated\n",
                             format_double(result.trace.t_diverged).c_str());
                return kExitDiverged;
            }
        } else {
            ControllerNodeResult result = run_controller_node(cfg.node_config());
            write_trace_csv((dir / "trace.csv").string(), result.trace);
            std::printf("rt controller: %zu periods, %d out-of-order discards\n",
                        result.trace.rows.size(), result.ooo_discards);
        }
    } catch (const RtError& e) {
        std::fprintf(stderr, "rt failure: %s\n", e.what());
        return kExitRtFailure;
    }
    return kExitOk;
}

} // namespace ncs::cli
