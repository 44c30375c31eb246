#include "symbxrl/store.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "symbxrl/trace_io.hpp"

namespace symbxrl {

void KnowledgeGraph::ingest(const std::string& action_key) {
    ++nodes_[action_key];
    ++node_total_;
    if (prev_) {
        ++edges_[{*prev_, action_key}];
        ++out_totals_[*prev_];
        ++edge_total_;
    }
    prev_ = action_key;
}

void KnowledgeGraph::end_sequence() { prev_.reset(); }

double KnowledgeGraph::edge_probability(const std::string& src, const std::string& dst) const {
    auto it = edges_.find({src, dst});
    if (it == edges_.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(out_totals_.at(src));
}

// ---------------------------------------------------------------------------

void ExperienceStore::record_step(const SymbolicState& state, const SymbolicAction& action,
                                  const Action& concrete, double reward, long long t,
                                  bool steered) {
    Experience exp;
    exp.t = t;
    exp.state_key = state.key();
    exp.action_key = action.key();
    exp.concrete = concrete;
    exp.reward = reward;
    exp.steered = steered;
    exp.sequence = sequence_;

    log_.push_back(exp);
    by_state_[exp.state_key].push_back(exp);
    last_seen_[exp.state_key] = static_cast<long long>(log_.size());

    auto& agg = aggregates_[{exp.state_key, exp.action_key}];
    if (agg.count == 0 || reward > agg.best_reward) {
        agg.best_reward = reward;
        agg.best_concrete = concrete;
    }
    agg.mean_reward = (agg.mean_reward * static_cast<double>(agg.count) + reward) /
                      static_cast<double>(agg.count + 1);
    ++agg.count;

    graph_.ingest(exp.action_key);
}

void ExperienceStore::end_sequence() {
    graph_.end_sequence();
    ++sequence_;
}

const std::vector<Experience>& ExperienceStore::experiences_for(
    const std::string& state_key) const {
    static const std::vector<Experience> empty;
    auto it = by_state_.find(state_key);
    return it == by_state_.end() ? empty : it->second;
}

std::optional<PairAggregate> ExperienceStore::aggregate_for(const std::string& state_key,
                                                            const std::string& action_key) const {
    auto it = aggregates_.find({state_key, action_key});
    if (it == aggregates_.end()) return std::nullopt;
    return it->second;
}

std::optional<double> ExperienceStore::mean_reward(const std::string& state_key,
                                                   const std::string& action_key) const {
    auto agg = aggregate_for(state_key, action_key);
    if (!agg) return std::nullopt;
    return agg->mean_reward;
}

double state_distance(const SymbolicState& a, const SymbolicState& b) {
    double d = 0.0;
    for (const auto& ta : a.terms) {
        const SymbolicTerm* tb = b.find(ta.subject);
        if (!tb) continue;  // only shared subjects contribute
        if (ta.pred != tb->pred) d += 1.0;
        if (ta.quartile && tb->quartile)
            d += std::abs(ordinal(*ta.quartile) - ordinal(*tb->quartile)) / 4.0;
    }
    return d;
}

std::optional<std::string> ExperienceStore::nearest_state(const SymbolicState& state,
                                                          double max_distance) const {
    double best_d = std::numeric_limits<double>::infinity();
    long long best_seen = -1;
    const std::string* best_key = nullptr;
    for (const auto& [key, exps] : by_state_) {
        double d = state_distance(state, parse_term_set(key));
        long long seen = last_seen_.at(key);
        if (d < best_d || (d == best_d && seen > best_seen)) {
            best_d = d;
            best_seen = seen;
            best_key = &key;
        }
    }
    if (!best_key || best_d > max_distance) return std::nullopt;
    return *best_key;
}

nlohmann::json ExperienceStore::to_json() const {
    nlohmann::json exps = nlohmann::json::array();
    for (const auto& e : log_) {
        exps.push_back({{"t", e.t},
                        {"state", e.state_key},
                        {"action", e.action_key},
                        {"concrete", action_to_json(e.concrete)},
                        {"reward", e.reward},
                        {"steered", e.steered},
                        {"seq", e.sequence}});
    }
    return {{"version", 1}, {"sequence", sequence_}, {"experiences", exps}, {"trackers", trackers_}};
}

ExperienceStore ExperienceStore::from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j.at("version").get<int>() != 1)
        throw std::runtime_error("store version mismatch (want 1)");
    ExperienceStore store;
    int seq = 0;
    for (const auto& e : j.at("experiences")) {
        int eseq = e.at("seq").get<int>();
        while (seq < eseq) {
            store.end_sequence();
            ++seq;
        }
        store.record_step(parse_term_set(e.at("state").get<std::string>()),
                          parse_term_set(e.at("action").get<std::string>()),
                          action_from_json(e.at("concrete")), e.at("reward").get<double>(),
                          e.at("t").get<long long>(), e.at("steered").get<bool>());
    }
    int saved_seq = j.value("sequence", seq);
    while (seq < saved_seq) {
        store.end_sequence();
        ++seq;
    }
    store.sequence_ = seq;
    store.trackers_ = j.at("trackers");
    return store;
}

void ExperienceStore::save(const std::string& path) const {
    atomic_write(path, to_json().dump());
}

ExperienceStore ExperienceStore::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open store file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("corrupt store file '" + path + "': " + e.what());
    }
    return from_json(j);
}

}  // namespace symbxrl
