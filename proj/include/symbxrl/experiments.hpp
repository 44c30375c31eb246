#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symbxrl/playground.hpp"
#include "symbxrl/steering.hpp"

namespace symbxrl {

struct SeedOutcome {
    std::uint64_t seed = 0;
    double baseline_reward = 0.0;   // unsteered episode, same env seed
    double steered_reward = 0.0;
    double relative_improvement = 0.0;  // (steered - baseline) / |baseline|
    std::int64_t replaced_no_record = 0;  // kept decisions with reason no-record
    std::int64_t replaced_better_known = 0;
    std::int64_t replaced_constraint = 0;
    std::int64_t replaced_fallback_forced = 0;
    std::int64_t intent_violations = 0;  // applied actions violating an active intent
    std::vector<SteeringDecision> log;
    std::vector<std::string> applied_action_terms;  // per-group terms across the steered episode
    std::vector<double> baseline_step_rewards;
    std::vector<double> steered_step_rewards;
};

struct SteerExperimentConfig {
    MimoEnvConfig env;
    SymbolizerConfig symbolizer;
    SteeringConfig steering;
    std::vector<std::uint64_t> seeds;
    int warmup_episodes = 0;  // unsteered episodes on offset seeds pre-filling the store
    // Per-seed recording episodes on the steered episode's own env seed: the
    // first is the plain greedy path, the rest explore with recording_eps.
    int recording_episodes = 4;
    double recording_eps = 0.3;
    ForcingMode forcing = ForcingMode::Steer;
};

// Per seed: one unsteered episode gives the paired baseline and populates the
// store (on top of the shared warmup store); the steered episode then reruns
// the same env seed with online store updates. Accel mode starts from an
// empty store instead. Outcomes are ordered by seed.
std::vector<SeedOutcome> run_steer_experiment(const SteerExperimentConfig& config,
                                              const TdAgent& trained_agent);

// One plain greedy episode; returns per-step rewards.
std::vector<double> run_plain_episode(const MimoEnvConfig& env_config, const TdAgent& agent,
                                      std::uint64_t seed);

double median(std::vector<double> values);

}  // namespace symbxrl
