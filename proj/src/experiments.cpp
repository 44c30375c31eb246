#include "symbxrl/experiments.hpp"

#include <algorithm>
#include <cmath>

namespace symbxrl {

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> run_plain_episode(const MimoEnvConfig& env_config, const TdAgent& agent,
                                      std::uint64_t seed) {
    MimoEnv env(env_config);
    env.reset(seed);
    TdAgent actor = agent;  // act() draws no randomness at epsilon = 0
    std::vector<double> rewards;
    for (int t = 0; t < env_config.horizon; ++t) {
        A2Action action = actor.act(env.state(), 0.0);
        rewards.push_back(env.step(action));
    }
    return rewards;
}

namespace {

// Unsteered episode recorded into the store through the shared symbolizer.
// With eps > 0 the actor explores, widening the per-state action coverage.
std::vector<double> run_recording_episode(const MimoEnvConfig& env_config, const TdAgent& agent,
                                          ExperienceStore& store, SymbolizerState& symbolizer,
                                          std::uint64_t seed, double eps = 0.0,
                                          std::uint64_t actor_seed = 0) {
    MimoEnv env(env_config);
    env.reset(seed);
    TdAgent actor = agent;
    if (eps > 0.0) actor.reseed(actor_seed);
    std::vector<double> rewards;
    for (int t = 0; t < env_config.horizon; ++t) {
        A2Action action = actor.act(env.state(), eps);
        Step record = env.observe(action, 0.0);
        SymbolicState sym_state = symbolizer.symbolize_state(record);
        SymbolicAction sym_action = symbolizer.symbolize_action(action);
        double reward = env.step(action);
        store.record_step(sym_state, sym_action, action, reward, t, false);
        rewards.push_back(reward);
    }
    store.end_sequence();
    return rewards;
}

}  // namespace

std::vector<SeedOutcome> run_steer_experiment(const SteerExperimentConfig& config,
                                              const TdAgent& trained_agent) {
    config.steering.validate();
    bool accel = config.steering.mode == SteeringMode::Accel;

    // Shared warmup store; accel mode learns online from an empty one.
    ExperienceStore warmup;
    SymbolizerState warmup_sym(config.env.schema, config.symbolizer);
    if (!accel) {
        for (int w = 0; w < config.warmup_episodes; ++w)
            run_recording_episode(config.env, trained_agent, warmup, warmup_sym,
                                  config.env.seed + 1000 + static_cast<std::uint64_t>(w));
    }

    std::vector<SeedOutcome> outcomes(config.seeds.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(config.seeds.size()); ++i) {
        std::uint64_t seed = config.seeds[static_cast<size_t>(i)];
        SeedOutcome out;
        out.seed = seed;

        out.baseline_step_rewards = run_plain_episode(config.env, trained_agent, seed);
        for (double r : out.baseline_step_rewards) out.baseline_reward += r;

        ExperienceStore store = warmup;
        SymbolizerState symbolizer = warmup_sym;
        if (!accel) {
            for (int r = 0; r < config.recording_episodes; ++r)
                run_recording_episode(config.env, trained_agent, store, symbolizer, seed,
                                      r == 0 ? 0.0 : config.recording_eps,
                                      seed * 1000 + static_cast<std::uint64_t>(r));
        }

        MimoEnv env(config.env);
        env.reset(seed);
        TdAgent actor = trained_agent;
        EpisodeResult steered = run_steered_episode(env, actor, store, symbolizer,
                                                    config.steering, config.env.horizon,
                                                    config.forcing);
        out.steered_reward = steered.cumulative_reward;
        for (const auto& step : steered.trajectory) out.steered_step_rewards.push_back(step.reward);
        out.log = steered.log;
        out.applied_action_terms = steered.applied_terms;

        for (const auto& d : steered.log) {
            switch (d.reason) {
                case SteerReason::NoRecord: ++out.replaced_no_record; break;
                case SteerReason::BetterKnown: ++out.replaced_better_known; break;
                case SteerReason::Constraint: ++out.replaced_constraint; break;
                case SteerReason::FallbackForced: ++out.replaced_fallback_forced; break;
                case SteerReason::None: break;
            }
            if (!satisfies_all(d.applied, config.steering.intents, d.t)) ++out.intent_violations;
        }

        double denom = std::max(std::abs(out.baseline_reward), 1e-12);
        out.relative_improvement = (out.steered_reward - out.baseline_reward) / denom;
        outcomes[static_cast<size_t>(i)] = std::move(out);
    }
    return outcomes;
}

}  // namespace symbxrl
