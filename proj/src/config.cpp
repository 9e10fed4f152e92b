#include "ncs/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "ncs/error.hpp"

namespace ncs {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError(path.empty() ? item.key() : path + "." + item.key(),
                              "unknown key");
        }
    }
}

double get_number(const json& obj, const std::string& path, const char* key, double def) {
    if (!obj.contains(key)) {
        return def;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(path + "." + key, "expected a number");
    }
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key, int def) {
    if (!obj.contains(key)) {
        return def;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(path + "." + key, "expected an integer");
    }
    return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& path, const char* key,
                      std::uint64_t def) {
    if (!obj.contains(key)) {
        return def;
    }
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
        throw ConfigError(path + "." + key, "expected an unsigned integer");
    }
    if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
        throw ConfigError(path + "." + key, "must be non-negative");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       const std::string& def) {
    if (!obj.contains(key)) {
        return def;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw ConfigError(path + "." + key, "expected a string");
    }
    return v.get<std::string>();
}

DelayModel parse_delay(const json& obj, DelayModel def) {
    check_keys(obj, "channel.delay", {"kind", "value", "mean", "d_max"});
    DelayModel model = def;
    const std::string kind = get_string(obj, "channel.delay", "kind", "uniform");
    if (kind == "constant") {
        model.kind = DelayKind::constant;
    } else if (kind == "uniform") {
        model.kind = DelayKind::uniform;
    } else if (kind == "truncated_exponential") {
        model.kind = DelayKind::truncated_exponential;
    } else {
        throw ConfigError("channel.delay.kind",
                          "expected constant | uniform | truncated_exponential");
    }
    model.d_max = get_number(obj, "channel.delay", "d_max", def.d_max);
    model.value = get_number(obj, "channel.delay", "value",
                             model.kind == DelayKind::constant ? def.value : 0.0);
    model.mean = get_number(obj, "channel.delay", "mean", def.mean);
    return model;
}

} // namespace

NodeConfig RunConfig::node_config() const {
    NodeConfig node;
    node.bind = rt_bind;
    node.peer = rt_peer;
    node.role = rt_role;
    node.sim = sim;
    node.plant = plant;
    node.gains = gains;
    node.channel = channel;
    node.sync_timeout = rt_sync_timeout;
    return node;
}

RunConfig load_run_config(const json& root, std::optional<std::uint64_t> seed_override) {
    RunConfig cfg;
    check_keys(root, "",
               {"plant", "controller", "sim", "channel", "objective", "ga", "rt"});

    if (root.contains("plant")) {
        const json& p = root.at("plant");
        check_keys(p, "plant", {"K", "T", "L"});
        cfg.plant.gain = get_number(p, "plant", "K", cfg.plant.gain);
        cfg.plant.time_constant = get_number(p, "plant", "T", cfg.plant.time_constant);
        cfg.plant.dead_time = get_number(p, "plant", "L", cfg.plant.dead_time);
    }

    if (root.contains("controller")) {
        const json& c = root.at("controller");
        check_keys(c, "controller", {"kp", "ki"});
        cfg.gains.kp = get_number(c, "controller", "kp", cfg.gains.kp);
        cfg.gains.ki = get_number(c, "controller", "ki", cfg.gains.ki);
    }

    cfg.sim.seed = 1;
    if (root.contains("sim")) {
        const json& s = root.at("sim");
        check_keys(s, "sim", {"Ts", "tick_divisor", "horizon", "setpoint", "seed"});
        cfg.sim.control_period = get_number(s, "sim", "Ts", cfg.sim.control_period);
        cfg.sim.tick_divisor = get_int(s, "sim", "tick_divisor", cfg.sim.tick_divisor);
        cfg.sim.horizon = get_number(s, "sim", "horizon", cfg.sim.horizon);
        cfg.sim.setpoint = get_number(s, "sim", "setpoint", cfg.sim.setpoint);
        cfg.sim.seed = get_u64(s, "sim", "seed", cfg.sim.seed);
    }
    if (seed_override) {
        cfg.sim.seed = *seed_override;
    }

    if (root.contains("channel")) {
        const json& ch = root.at("channel");
        check_keys(ch, "channel", {"drop_prob", "delay", "ooo_buffer_cap"});
        cfg.channel.drop_prob = get_number(ch, "channel", "drop_prob", cfg.channel.drop_prob);
        if (ch.contains("delay")) {
            cfg.channel.delay = parse_delay(ch.at("delay"), cfg.channel.delay);
        }
        cfg.channel.ooo_buffer_cap =
            get_int(ch, "channel", "ooo_buffer_cap", cfg.channel.ooo_buffer_cap);
    }

    if (root.contains("objective")) {
        const json& o = root.at("objective");
        check_keys(o, "objective", {"w1", "w2"});
        cfg.weights.w1 = get_number(o, "objective", "w1", cfg.weights.w1);
        cfg.weights.w2 = get_number(o, "objective", "w2", cfg.weights.w2);
    }

    cfg.ga.master_seed = cfg.sim.seed;
    if (root.contains("ga")) {
        const json& g = root.at("ga");
        check_keys(g, "ga",
                   {"pop_size", "generations", "bounds", "crossover_prob", "mutation_std",
                    "mutation_prob", "elitism_count", "realizations", "master_seed"});
        cfg.ga.pop_size = get_int(g, "ga", "pop_size", cfg.ga.pop_size);
        cfg.ga.generations = get_int(g, "ga", "generations", cfg.ga.generations);
        if (g.contains("bounds")) {
            const json& b = g.at("bounds");
            check_keys(b, "ga.bounds", {"kp_min", "kp_max", "ki_min", "ki_max"});
            cfg.ga.bounds.kp_min = get_number(b, "ga.bounds", "kp_min", cfg.ga.bounds.kp_min);
            cfg.ga.bounds.kp_max = get_number(b, "ga.bounds", "kp_max", cfg.ga.bounds.kp_max);
            cfg.ga.bounds.ki_min = get_number(b, "ga.bounds", "ki_min", cfg.ga.bounds.ki_min);
            cfg.ga.bounds.ki_max = get_number(b, "ga.bounds", "ki_max", cfg.ga.bounds.ki_max);
        }
        cfg.ga.crossover_prob = get_number(g, "ga", "crossover_prob", cfg.ga.crossover_prob);
        cfg.ga.mutation_std = get_number(g, "ga", "mutation_std", cfg.ga.mutation_std);
        cfg.ga.mutation_prob = get_number(g, "ga", "mutation_prob", cfg.ga.mutation_prob);
        cfg.ga.elitism_count = get_int(g, "ga", "elitism_count", cfg.ga.elitism_count);
        cfg.ga.realizations = get_int(g, "ga", "realizations", cfg.ga.realizations);
        cfg.ga.master_seed = get_u64(g, "ga", "master_seed", cfg.ga.master_seed);
    }

    if (root.contains("rt")) {
        const json& rt = root.at("rt");
        check_keys(rt, "rt", {"bind", "peer", "role", "sync_timeout"});
        cfg.rt_bind = parse_endpoint(
            get_string(rt, "rt", "bind",
                       cfg.rt_bind.host + ":" + std::to_string(cfg.rt_bind.port)),
            "rt.bind");
        cfg.rt_peer = parse_endpoint(
            get_string(rt, "rt", "peer",
                       cfg.rt_peer.host + ":" + std::to_string(cfg.rt_peer.port)),
            "rt.peer");
        const std::string role = get_string(rt, "rt", "role", "plant_master");
        if (role == "plant_master") {
            cfg.rt_role = NodeRole::plant_master;
        } else if (role == "controller_slave") {
            cfg.rt_role = NodeRole::controller_slave;
        } else {
            throw ConfigError("rt.role", "expected plant_master | controller_slave");
        }
        cfg.rt_sync_timeout = get_number(rt, "rt", "sync_timeout", cfg.rt_sync_timeout);
        if (!(cfg.rt_sync_timeout > 0.0)) {
            throw ConfigError("rt.sync_timeout", "must be positive");
        }
    }

    // Cross-field validation through the module validators so the error
    // wording matches the library.
    validate_sim_config(cfg.sim);
    Plant probe(cfg.plant, cfg.sim.tick());
    Channel chan_probe(cfg.channel, cfg.sim.tick(), Pcg32(0, 0));
    validate_weights(cfg.weights);
    validate_ga_config(cfg.ga);
    return cfg;
}

RunConfig load_run_config_file(const std::string& path,
                               std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config", "cannot open " + path);
    }
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("JSON parse error: ") + e.what());
    }
    return load_run_config(root, seed_override);
}

nlohmann::json effective_config_json(const RunConfig& cfg) {
    json delay{{"d_max", cfg.channel.delay.d_max}};
    switch (cfg.channel.delay.kind) {
    case DelayKind::constant:
        delay["kind"] = "constant";
        delay["value"] = cfg.channel.delay.value;
        break;
    case DelayKind::uniform:
        delay["kind"] = "uniform";
        break;
    case DelayKind::truncated_exponential:
        delay["kind"] = "truncated_exponential";
        delay["mean"] = cfg.channel.delay.mean;
        break;
    }

    return json{
        {"plant", {{"K", cfg.plant.gain}, {"T", cfg.plant.time_constant}, {"L", cfg.plant.dead_time}}},
        {"controller", {{"kp", cfg.gains.kp}, {"ki", cfg.gains.ki}}},
        {"sim",
         {{"Ts", cfg.sim.control_period},
          {"tick_divisor", cfg.sim.tick_divisor},
          {"horizon", cfg.sim.horizon},
          {"setpoint", cfg.sim.setpoint},
          {"seed", cfg.sim.seed}}},
        {"channel",
         {{"drop_prob", cfg.channel.drop_prob},
          {"delay", delay},
          {"ooo_buffer_cap", cfg.channel.ooo_buffer_cap}}},
        {"objective", {{"w1", cfg.weights.w1}, {"w2", cfg.weights.w2}}},
        {"ga",
         {{"pop_size", cfg.ga.pop_size},
          {"generations", cfg.ga.generations},
          {"bounds",
           {{"kp_min", cfg.ga.bounds.kp_min},
            {"kp_max", cfg.ga.bounds.kp_max},
            {"ki_min", cfg.ga.bounds.ki_min},
            {"ki_max", cfg.ga.bounds.ki_max}}},
          {"crossover_prob", cfg.ga.crossover_prob},
          {"mutation_std", cfg.ga.mutation_std},
          {"mutation_prob", cfg.ga.mutation_prob},
          {"elitism_count", cfg.ga.elitism_count},
          {"realizations", cfg.ga.realizations},
          {"master_seed", cfg.ga.master_seed}}},
        {"rt",
         {{"bind", cfg.rt_bind.host + ":" + std::to_string(cfg.rt_bind.port)},
          {"peer", cfg.rt_peer.host + ":" + std::to_string(cfg.rt_peer.port)},
          {"role", cfg.rt_role == NodeRole::plant_master ? "plant_master" : "controller_slave"},
          {"sync_timeout", cfg.rt_sync_timeout}}},
    };
}

} // namespace ncs
