#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"

#include <nlohmann/json.hpp>

namespace symbxrl {

struct MimoEnvConfig {
    SchemaA2 schema;
    double rho_in = 0.8;    // intra-group channel correlation
    double rho_out = 0.1;   // inter-group channel correlation
    double ar_coeff = 0.99; // AR(1) coefficient; low speed 0.99, high speed 0.9
    double noise_power = 1.0;
    double gain_variance = 1.0;  // larger under NLOS
    double mse_noise = 0.002;    // measurement-noise scale on MSE
    double fairness_weight = 0.1;
    int horizon = 1000;
    std::uint64_t seed = 1;
    std::string channel = "LOS";   // label only, carried into trace meta
    std::string speed = "low";     // label only

    nlohmann::json to_json() const;
    static MimoEnvConfig from_json(const nlohmann::json& j);
};

struct EnvState {
    std::vector<double> gain;  // per-user channel power gain
    std::vector<double> mse;
    std::vector<double> dtu;   // timeslots since last scheduled
};

class MimoEnv {
public:
    explicit MimoEnv(MimoEnvConfig config);

    const EnvState& state() const { return state_; }
    const MimoEnvConfig& config() const { return config_; }
    long long t() const { return t_; }

    // Applies the schedule mask, returns the reward; advances channels,
    // MSE and DTU bookkeeping.
    double step(const A2Action& action);

    // Sum-rate + fairness reward of `action` in the current state, without
    // advancing the environment.
    double reward_of(const A2Action& action) const;

    // Trace record of the *current* state with the given action/reward;
    // call before step() advances the environment.
    Step observe(const A2Action& action, double reward) const;
    void reset(std::uint64_t seed);

private:
    double correlation(int u, int v) const;
    double next_gaussian();

    MimoEnvConfig config_;
    EnvState state_;
    std::vector<double> latent_re_, latent_im_;
    std::mt19937_64 rng_;
    long long t_ = 0;
};

// ---------------------------------------------------------------------------
// Value-based TD agent over the 2^N mask action space, linear per-action
// value approximation over normalized state features.

struct AgentConfig {
    double alpha = 0.05;
    double gamma = 0.9;
    double eps_start = 1.0;
    double eps_end = 0.05;
    int eps_decay_episodes = 150;
    std::uint64_t seed = 7;
};

class TdAgent {
public:
    TdAgent(AgentConfig config, const SchemaA2& schema);

    A2Action act(const EnvState& state, double epsilon);
    void reseed(std::uint64_t seed) { rng_.seed(seed); }
    void learn(const EnvState& state, const A2Action& action, double reward,
               const EnvState& next_state);

    nlohmann::json to_json() const;
    static TdAgent from_json(const nlohmann::json& j, const SchemaA2& schema);

    void save(const std::string& path, const nlohmann::json& run_config) const;
    static TdAgent load(const std::string& path, const SchemaA2& schema);

private:
    std::vector<double> features(const EnvState& state) const;
    double value(const std::vector<double>& phi, int action_id) const;
    int greedy(const std::vector<double>& phi) const;

    AgentConfig config_;
    int n_users_;
    int n_actions_;
    int n_features_;
    std::vector<double> weights_;  // n_actions x n_features
    std::mt19937_64 rng_;

    friend class TrainingRun;
};

struct TrainResult {
    std::vector<double> episode_returns;
    std::vector<std::pair<int, std::string>> checkpoints;  // (episode, path)
};

// Trains a fresh agent on the environment config, writing a checkpoint file
// after each listed episode count; episode length = config.horizon.
TrainResult train_agent(const MimoEnvConfig& env_config, const AgentConfig& agent_config,
                        int episodes, const std::vector<int>& checkpoint_episodes,
                        const std::string& out_dir);

// ---------------------------------------------------------------------------
// Synthetic A1-style trace: piecewise-stationary KPI regimes, random actions.
std::vector<Step> synth_trace_a1(std::uint64_t seed, int steps);

}  // namespace symbxrl
