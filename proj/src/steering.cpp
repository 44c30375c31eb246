#include "symbxrl/steering.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "symbxrl/trace_io.hpp"

namespace symbxrl {

SteeringMode steering_mode_from(const std::string& name) {
    if (name == "off") return SteeringMode::Off;
    if (name == "reward-max") return SteeringMode::RewardMax;
    if (name == "condition") return SteeringMode::Condition;
    if (name == "accel") return SteeringMode::Accel;
    throw std::invalid_argument("unknown steering mode '" + name + "'");
}

const char* to_string(SteeringMode mode) {
    switch (mode) {
        case SteeringMode::Off: return "off";
        case SteeringMode::RewardMax: return "reward-max";
        case SteeringMode::Condition: return "condition";
        case SteeringMode::Accel: return "accel";
    }
    return "?";
}

const char* to_string(SteerReason reason) {
    switch (reason) {
        case SteerReason::None: return "none";
        case SteerReason::NoRecord: return "no-record";
        case SteerReason::BetterKnown: return "better-known";
        case SteerReason::Constraint: return "constraint";
        case SteerReason::FallbackForced: return "fallback-forced";
    }
    return "?";
}

void SteeringConfig::validate() const {
    if (start_fraction < 0.0 || start_fraction > 1.0)
        throw std::invalid_argument("start fraction must be in [0,1]");
    if (!std::isfinite(delta) || delta < 0.0)
        throw std::invalid_argument("hysteresis delta must be finite and >= 0");
    validate_intents(intents);
}

nlohmann::json SteeringDecision::to_json() const {
    nlohmann::json j = {{"t", t},
                        {"proposed", proposed.mask},
                        {"applied", applied.mask},
                        {"replaced", replaced},
                        {"reason", to_string(reason)}};
    if (est_proposed) j["est_proposed"] = *est_proposed;
    if (est_applied) j["est_applied"] = *est_applied;
    return j;
}

namespace {

std::optional<std::string> match_state(const ExperienceStore& store, const SymbolicState& state,
                                       const SteeringConfig& config) {
    std::string key = state.key();
    if (!store.experiences_for(key).empty()) return key;
    if (config.fallback_enabled && store.size() > 0)
        return store.nearest_state(state, config.fallback_max_distance);
    return std::nullopt;
}

struct Candidate {
    double mean = 0.0;
    double best_reward = 0.0;
    const Action* best_concrete = nullptr;
};

// Per-symbolic-action mean/best over the experiences passing `keep`.
std::map<std::string, Candidate> candidates_for(const std::vector<Experience>& exps,
                                                const auto& keep) {
    std::map<std::string, std::pair<double, std::int64_t>> sums;
    std::map<std::string, Candidate> out;
    for (const auto& e : exps) {
        if (!keep(e)) continue;
        auto& [sum, count] = sums[e.action_key];
        sum += e.reward;
        ++count;
        auto& c = out[e.action_key];
        if (count == 1 || e.reward > c.best_reward) {
            c.best_reward = e.reward;
            c.best_concrete = &e.concrete;
        }
    }
    for (auto& [key, c] : out) {
        auto& [sum, count] = sums[key];
        c.mean = sum / static_cast<double>(count);
    }
    return out;
}

SteeringDecision reward_max_impl(const ExperienceStore& store, const SymbolicState& state,
                                 const A2Action& proposed, const SymbolicAction& proposed_sym,
                                 const SteeringConfig& config, long long t, const auto& keep) {
    SteeringDecision d;
    d.t = t;
    d.proposed = proposed;
    d.applied = proposed;

    auto match = match_state(store, state, config);
    if (!match) {
        d.reason = SteerReason::NoRecord;
        return d;
    }
    auto cands = candidates_for(store.experiences_for(*match), keep);
    auto prop_it = cands.find(proposed_sym.key());
    if (prop_it == cands.end()) {
        d.reason = SteerReason::NoRecord;
        return d;
    }
    d.est_proposed = prop_it->second.mean;

    const std::string* best_key = &prop_it->first;
    double best_mean = prop_it->second.mean;
    for (const auto& [key, c] : cands) {
        if (c.mean > best_mean) {
            best_mean = c.mean;
            best_key = &key;
        }
    }
    if (*best_key != proposed_sym.key() && best_mean > *d.est_proposed + config.delta) {
        d.applied = std::get<A2Action>(*cands.at(*best_key).best_concrete);
        d.replaced = true;
        d.reason = SteerReason::BetterKnown;
        d.est_applied = best_mean;
    }
    return d;
}

}  // namespace

SteeringDecision steer_reward_max(const ExperienceStore& store, const SymbolicState& state,
                                  const A2Action& proposed, const SymbolicAction& proposed_sym,
                                  const SteeringConfig& config, long long t) {
    return reward_max_impl(store, state, proposed, proposed_sym, config, t,
                           [](const Experience&) { return true; });
}

A2Action direct_force(const A2Action& proposed, const std::vector<Intent>& intents, long long t) {
    A2Action forced = proposed;
    for (const auto& intent : intents) {
        if (!intent.active_at(t)) continue;
        for (const auto& atom : intent.atoms())
            forced.mask[static_cast<size_t>(atom.user)] = atom.schedule ? 1 : 0;
    }
    if (!satisfies_all(forced, intents, t))
        throw std::invalid_argument("conflicting intent atoms");
    return forced;
}

SteeringDecision steer_conditioned(const ExperienceStore& store, const SymbolicState& state,
                                   const A2Action& proposed, const SymbolicAction& proposed_sym,
                                   const SteeringConfig& config, long long t) {
    const auto& intents = config.intents;
    auto satisfying = [&](const Experience& e) {
        return satisfies_all(std::get<A2Action>(e.concrete), intents, t);
    };

    if (satisfies_all(proposed, intents, t))
        return reward_max_impl(store, state, proposed, proposed_sym, config, t, satisfying);

    SteeringDecision d;
    d.t = t;
    d.proposed = proposed;

    auto match = match_state(store, state, config);
    const Experience* best = nullptr;
    if (match) {
        for (const auto& e : store.experiences_for(*match))
            if (satisfying(e) && (!best || e.reward > best->reward)) best = &e;
    }
    if (best) {
        d.applied = std::get<A2Action>(best->concrete);
        d.replaced = true;
        d.reason = SteerReason::Constraint;
        d.est_applied = best->reward;
    } else {
        d.applied = direct_force(proposed, intents, t);
        d.replaced = d.applied.mask != proposed.mask;
        d.reason = SteerReason::FallbackForced;
    }
    return d;
}

EpisodeResult run_steered_episode(MimoEnv& env, TdAgent& agent, ExperienceStore& store,
                                  SymbolizerState& symbolizer, const SteeringConfig& config,
                                  int horizon, ForcingMode forcing) {
    config.validate();
    EpisodeResult result;
    double start_t = config.start_fraction * static_cast<double>(horizon);

    for (int t = 0; t < horizon; ++t) {
        bool pre_start = static_cast<double>(t) < start_t;
        A2Action proposed = agent.act(env.state(), 0.0);
        Step record = env.observe(proposed, 0.0);
        SymbolicState sym_state = symbolizer.symbolize_state(record);

        // Probe symbolization of the proposal on a copy, so the real count
        // trackers only ever observe the applied action.
        SymbolizerState probe = symbolizer;
        SymbolicAction proposed_sym = probe.symbolize_action(proposed);

        A2Action applied = proposed;
        bool active = config.mode != SteeringMode::Off && !pre_start;
        if (active) {
            SteeringDecision decision;
            if (forcing == ForcingMode::DirectForce) {
                decision.t = t;
                decision.proposed = proposed;
                decision.applied = direct_force(proposed, config.intents, t);
                decision.replaced = decision.applied.mask != proposed.mask;
                decision.reason = SteerReason::FallbackForced;
            } else if (config.mode == SteeringMode::Condition) {
                decision = steer_conditioned(store, sym_state, proposed, proposed_sym, config, t);
            } else {
                decision = steer_reward_max(store, sym_state, proposed, proposed_sym, config, t);
            }
            applied = decision.applied;
            result.log.push_back(decision);
        }

        SymbolicAction applied_sym = symbolizer.symbolize_action(applied);
        for (const auto& term : applied_sym.terms)
            result.applied_terms.push_back(render_term(term));
        double reward = env.step(applied);
        record.action = applied;
        record.reward = reward;
        result.trajectory.push_back(record);
        result.cumulative_reward += reward;
        store.record_step(sym_state, applied_sym, applied, reward, t,
                          applied.mask != proposed.mask);
    }
    store.end_sequence();
    return result;
}

}  // namespace symbxrl
