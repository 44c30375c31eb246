#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"
#include "symbxrl/intent.hpp"
#include "symbxrl/playground.hpp"
#include "symbxrl/store.hpp"
#include "symbxrl/symbolizer.hpp"

#include <nlohmann/json.hpp>

namespace symbxrl {

enum class SteeringMode { Off, RewardMax, Condition, Accel };

SteeringMode steering_mode_from(const std::string& name);
const char* to_string(SteeringMode mode);

struct SteeringConfig {
    SteeringMode mode = SteeringMode::Off;
    double start_fraction = 0.0;     // steering active from t >= start_fraction * T
    double delta = 0.0;              // hysteresis: replace only if mean gain exceeds it
    bool fallback_enabled = true;    // similarity search when exact state unseen
    double fallback_max_distance = 1.0;
    std::vector<Intent> intents;     // condition mode

    void validate() const;
};

enum class SteerReason { None, NoRecord, BetterKnown, Constraint, FallbackForced };

const char* to_string(SteerReason reason);

struct SteeringDecision {
    long long t = 0;
    A2Action proposed;
    A2Action applied;
    bool replaced = false;
    SteerReason reason = SteerReason::None;
    std::optional<double> est_proposed;  // stored mean reward of the proposed symbolic action
    std::optional<double> est_applied;

    nlohmann::json to_json() const;
};

// Eq.-style per-step reward maximization over the agent's recorded
// experiences for the (exact or similar) matched state.
SteeringDecision steer_reward_max(const ExperienceStore& store, const SymbolicState& state,
                                  const A2Action& proposed, const SymbolicAction& proposed_sym,
                                  const SteeringConfig& config, long long t);

// Constraint enforcement: the applied action always satisfies every intent
// active at t, preferring the best-reward satisfying recorded action.
SteeringDecision steer_conditioned(const ExperienceStore& store, const SymbolicState& state,
                                   const A2Action& proposed, const SymbolicAction& proposed_sym,
                                   const SteeringConfig& config, long long t);

// Baseline: minimal mask edit satisfying the intents, reward-blind.
A2Action direct_force(const A2Action& proposed, const std::vector<Intent>& intents, long long t);

struct EpisodeResult {
    std::vector<Step> trajectory;          // applied actions and realized rewards
    std::vector<SteeringDecision> log;
    std::vector<std::string> applied_terms;  // per-group symbolic action terms, per step
    double cumulative_reward = 0.0;
};

enum class ForcingMode { Steer, DirectForce };

// Runs one episode: the agent proposes greedily, steering (or direct forcing)
// rewrites the action when active, the applied action executes, and every
// (state, applied action, reward) lands in the store, flagged if replaced.
EpisodeResult run_steered_episode(MimoEnv& env, TdAgent& agent, ExperienceStore& store,
                                  SymbolizerState& symbolizer, const SteeringConfig& config,
                                  int horizon, ForcingMode forcing = ForcingMode::Steer);

}  // namespace symbxrl
