#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ncs/channel.hpp"
#include "ncs/controller.hpp"
#include "ncs/ga.hpp"
#include "ncs/node.hpp"
#include "ncs/objective.hpp"
#include "ncs/plant.hpp"
#include "ncs/sim.hpp"

namespace ncs {

/// Everything a run needs, with documented defaults for every field. Loaded
/// from a JSON document with strict key checking: unknown keys are rejected
/// with their dotted path, missing keys take the defaults below.
struct RunConfig {
    PlantParams plant;                    // K=5, T=1.5, L=1
    PiGains gains{0.25, 0.15};            // conservative stable PI
    SimConfig sim;                        // Ts=0.1, divisor 10, horizon 30, setpoint 1, seed 1
    ChannelConfig channel;                // drop 0.1, uniform delay d_max 0.3, cap 1000
    ObjectiveWeights weights;             // w1 = w2 = 1
    GaConfig ga;                          // see GaConfig defaults
    Endpoint rt_bind{"127.0.0.1", 47701};
    Endpoint rt_peer{"127.0.0.1", 47702};
    NodeRole rt_role = NodeRole::plant_master;
    double rt_sync_timeout = 5.0;

    NodeConfig node_config() const;
};

/// Parse and validate. `seed_override` replaces sim.seed before the GA master
/// seed default (which is sim.seed) is resolved. Throws ConfigError naming
/// the offending field.
RunConfig load_run_config(const nlohmann::json& root,
                          std::optional<std::uint64_t> seed_override = std::nullopt);

RunConfig load_run_config_file(const std::string& path,
                               std::optional<std::uint64_t> seed_override = std::nullopt);

/// Fully resolved (defaults applied) configuration; feeding this document
/// back through load_run_config reproduces the run exactly.
nlohmann::json effective_config_json(const RunConfig& cfg);

} // namespace ncs
