#include "ncs/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncs/error.hpp"
#include "ncs/rng.hpp"

namespace ncs {

void validate_ga_config(const GaConfig& cfg) {
    if (cfg.pop_size < 2) {
        throw ConfigError("ga.pop_size", "must be at least 2");
    }
    if (cfg.generations < 0) {
        throw ConfigError("ga.generations", "must be non-negative");
    }
    if (cfg.elitism_count < 1 || cfg.elitism_count > cfg.pop_size) {
        throw ConfigError("ga.elitism_count", "must be in [1, pop_size]");
    }
    if (cfg.realizations < 1) {
        throw ConfigError("ga.realizations", "must be at least 1");
    }
    if (!(cfg.crossover_prob >= 0.0 && cfg.crossover_prob <= 1.0)) {
        throw ConfigError("ga.crossover_prob", "must be in [0, 1]");
    }
    if (!(cfg.mutation_prob >= 0.0 && cfg.mutation_prob <= 1.0)) {
        throw ConfigError("ga.mutation_prob", "must be in [0, 1]");
    }
    if (!(cfg.mutation_std >= 0.0) || !std::isfinite(cfg.mutation_std)) {
        throw ConfigError("ga.mutation_std", "must be non-negative and finite");
    }
    auto check_bounds = [](const char* field, double lo, double hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw ConfigError(field, "bounds must be finite with min < max");
        }
    };
    check_bounds("ga.bounds.kp", cfg.bounds.kp_min, cfg.bounds.kp_max);
    check_bounds("ga.bounds.ki", cfg.bounds.ki_min, cfg.bounds.ki_max);
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t master_seed, std::uint64_t stream, int n) {
    Pcg32 rng(master_seed, stream);
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
    for (auto& s : seeds) {
        s = rng.next_u64();
    }
    return seeds;
}

double evaluate_fitness(const PiGains& gains, const PlantParams& plant,
                        const ChannelConfig& chan_cfg, const SimConfig& sim,
                        const ObjectiveWeights& w, std::span<const std::uint64_t> eval_seeds) {
    double total = 0.0;
    SimConfig run_cfg = sim;
    for (std::uint64_t seed : eval_seeds) {
        run_cfg.seed = seed;
        total += objective(run_closed_loop(plant, gains, chan_cfg, run_cfg).trace, w);
    }
    return total / static_cast<double>(eval_seeds.size());
}

namespace {

struct Scored {
    PiGains gains;
    double j = std::numeric_limits<double>::infinity();
};

GenerationStats stats_of(const std::vector<Scored>& pop) {
    GenerationStats s;
    s.best_j = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const Scored& ind : pop) {
        s.best_j = std::min(s.best_j, ind.j);
        sum += ind.j;
    }
    s.mean_j = sum / static_cast<double>(pop.size());
    return s;
}

// Indices of the n fittest individuals, ties broken by index.
std::vector<std::size_t> fittest(const std::vector<Scored>& pop, int n) {
    std::vector<std::size_t> idx(pop.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].j < pop[b].j; });
    idx.resize(static_cast<std::size_t>(n));
    return idx;
}

} // namespace

TuneResult ga_minimize(const GaConfig& cfg, const FitnessFn& fitness) {
    validate_ga_config(cfg);
    Pcg32 rng(cfg.master_seed, rng_stream::kGaOperators);

    const double kp_range = cfg.bounds.kp_max - cfg.bounds.kp_min;
    const double ki_range = cfg.bounds.ki_max - cfg.bounds.ki_min;

    auto clamp_gains = [&](PiGains g) {
        g.kp = std::clamp(g.kp, cfg.bounds.kp_min, cfg.bounds.kp_max);
        g.ki = std::clamp(g.ki, cfg.bounds.ki_min, cfg.bounds.ki_max);
        return g;
    };

    const auto pop_size = static_cast<std::size_t>(cfg.pop_size);
    std::vector<Scored> pop(pop_size);
    for (Scored& ind : pop) {
        ind.gains.kp = cfg.bounds.kp_min + rng.next_double() * kp_range;
        ind.gains.ki = cfg.bounds.ki_min + rng.next_double() * ki_range;
    }
    for (Scored& ind : pop) {
        ind.j = fitness(ind.gains);
    }

    TuneResult result;
    result.history.push_back(stats_of(pop));

    auto tournament = [&]() -> const Scored& {
        const Scored& a = pop[rng.next_below(static_cast<std::uint32_t>(pop_size))];
        const Scored& b = pop[rng.next_below(static_cast<std::uint32_t>(pop_size))];
        return a.j <= b.j ? a : b;
    };

    for (int gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Scored> next;
        next.reserve(pop_size);
        for (std::size_t i : fittest(pop, cfg.elitism_count)) {
            next.push_back(pop[i]); // fitness carried over, not re-simulated
        }

        while (next.size() < pop_size) {
            const Scored& p1 = tournament();
            const Scored& p2 = tournament();
            PiGains child = p1.gains;
            if (rng.next_double() < cfg.crossover_prob) {
                const double a_kp = rng.next_double();
                const double a_ki = rng.next_double();
                child.kp = a_kp * p1.gains.kp + (1.0 - a_kp) * p2.gains.kp;
                child.ki = a_ki * p1.gains.ki + (1.0 - a_ki) * p2.gains.ki;
            }
            if (rng.next_double() < cfg.mutation_prob) {
                child.kp += rng.next_gaussian() * cfg.mutation_std * kp_range;
            }
            if (rng.next_double() < cfg.mutation_prob) {
                child.ki += rng.next_gaussian() * cfg.mutation_std * ki_range;
            }
            child = clamp_gains(child);
            next.push_back({child, std::numeric_limits<double>::infinity()});
        }

        for (std::size_t i = static_cast<std::size_t>(cfg.elitism_count); i < pop_size; ++i) {
            next[i].j = fitness(next[i].gains);
        }
        pop = std::move(next);
        result.history.push_back(stats_of(pop));
    }

    const std::size_t best = fittest(pop, 1)[0];
    result.best_gains = pop[best].gains;
    result.best_j = pop[best].j;
    return result;
}

TuneResult ga_tune(const PlantParams& plant, const ChannelConfig& chan_cfg, const SimConfig& sim,
                   const ObjectiveWeights& w, const GaConfig& cfg) {
    validate_ga_config(cfg);
    validate_weights(w);
    std::vector<std::uint64_t> eval_seeds =
        derive_seeds(cfg.master_seed, rng_stream::kGaEvalSeeds, cfg.realizations);

    FitnessFn fitness = [&](const PiGains& gains) {
        return evaluate_fitness(gains, plant, chan_cfg, sim, w, eval_seeds);
    };
    TuneResult result = ga_minimize(cfg, fitness);
    result.eval_seeds = std::move(eval_seeds);
    return result;
}

} // namespace ncs
