#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ncs/controller.hpp"
#include "ncs/objective.hpp"
#include "ncs/sim.hpp"

namespace ncs {

struct GaBounds {
    double kp_min = 0.0;
    double kp_max = 2.0;
    double ki_min = 0.0;
    double ki_max = 2.0;
};

struct GaConfig {
    int pop_size = 20;
    int generations = 30;
    GaBounds bounds;
    double crossover_prob = 0.9;
    double mutation_std = 0.1;  // fraction of each gain range
    double mutation_prob = 0.2; // per-gene chance of a Gaussian kick
    int elitism_count = 2;
    int realizations = 4; // network seeds per fitness evaluation
    std::uint64_t master_seed = 0;
};

void validate_ga_config(const GaConfig& cfg);

struct GenerationStats {
    double best_j = 0.0;
    double mean_j = 0.0;
};

struct TuneResult {
    PiGains best_gains;
    double best_j = 0.0;
    std::vector<GenerationStats> history; // entry 0 is the initial population
    std::vector<std::uint64_t> eval_seeds;
};

using FitnessFn = std::function<double(const PiGains&)>;

/// Sample-average fitness over a fixed set of network seeds (common random
/// numbers): the stochastic objective becomes deterministic for the whole GA
/// run, so elitism yields exactly monotone best-cost history.
double evaluate_fitness(const PiGains& gains, const PlantParams& plant,
                        const ChannelConfig& chan_cfg, const SimConfig& sim,
                        const ObjectiveWeights& w, std::span<const std::uint64_t> eval_seeds);

/// Real-coded GA core: tournament selection (size 2), per-gene blend
/// crossover, Gaussian mutation clipped to bounds, elitism. Deterministic
/// given cfg.master_seed and a deterministic fitness function.
TuneResult ga_minimize(const GaConfig& cfg, const FitnessFn& fitness);

/// Full tuner: derives the common-random-number seeds from cfg.master_seed
/// and minimizes the simulated closed-loop objective over (kp, ki).
TuneResult ga_tune(const PlantParams& plant, const ChannelConfig& chan_cfg, const SimConfig& sim,
                   const ObjectiveWeights& w, const GaConfig& cfg);

/// n seeds from the given stream of a master seed (used for the CRN seeds and
/// for fresh out-of-sample re-scoring).
std::vector<std::uint64_t> derive_seeds(std::uint64_t master_seed, std::uint64_t stream, int n);

} // namespace ncs
