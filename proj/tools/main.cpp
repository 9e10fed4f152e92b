#include <CLI11.hpp>

#include "ncs/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Networked control system test-bed: simulate a PI loop over an "
                 "impaired channel, tune the gains with a GA, or run the loop "
                 "over real UDP between two nodes."};
    app.require_subcommand(1);

    ncs::cli::Options opts;
    std::string config_path;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "override sim.seed (and the GA master seed default)");
        cmd->add_option("--out", opts.out_dir, "output directory (default: current)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run; writes trace.csv and events.csv");
    add_common(simulate);

    CLI::App* tune = app.add_subcommand("tune", "GA gain search; writes gains.json and history.csv");
    add_common(tune);

    CLI::App* rt = app.add_subcommand("rt", "run one UDP node of the real-time pair");
    add_common(rt);
    std::string role;
    rt->add_option("--role", role, "plant | controller")
        ->check(CLI::IsMember({"plant", "controller"}));

    CLI11_PARSE(app, argc, argv);

    if (!config_path.empty()) {
        opts.config_path = config_path;
    }
    if (simulate->count("--seed") || tune->count("--seed") || rt->count("--seed")) {
        opts.seed = seed;
    }
    if (!role.empty()) {
        opts.role = role;
    }

    if (simulate->parsed()) {
        return ncs::cli::run_simulate(opts);
    }
    if (tune->parsed()) {
        return ncs::cli::run_tune(opts);
    }
    return ncs::cli::run_rt(opts);
}
