#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"

#include <nlohmann/json.hpp>

namespace symbxrl {

struct Experience {
    long long t = 0;
    std::string state_key;
    std::string action_key;
    Action concrete;
    double reward = 0.0;
    bool steered = false;   // applied action differed from the agent's proposal
    int sequence = 0;
};

// Directed graph over symbolic-action keys; node weight = occurrence count,
// edge weight = transition count. Edge probability = count / outgoing total.
class KnowledgeGraph {
public:
    void ingest(const std::string& action_key);  // appends to the current sequence
    void end_sequence();

    const std::map<std::string, std::int64_t>& nodes() const { return nodes_; }
    const std::map<std::pair<std::string, std::string>, std::int64_t>& edges() const {
        return edges_;
    }
    std::int64_t node_total() const { return node_total_; }
    std::int64_t edge_total() const { return edge_total_; }
    double edge_probability(const std::string& src, const std::string& dst) const;

    bool operator==(const KnowledgeGraph&) const = default;

private:
    std::map<std::string, std::int64_t> nodes_;
    std::map<std::pair<std::string, std::string>, std::int64_t> edges_;
    std::map<std::string, std::int64_t> out_totals_;
    std::optional<std::string> prev_;
    std::int64_t node_total_ = 0;
    std::int64_t edge_total_ = 0;

    friend class ExperienceStore;
};

struct PairAggregate {
    std::int64_t count = 0;
    double mean_reward = 0.0;
    double best_reward = 0.0;
    Action best_concrete;
};

// Associative index from symbolic state to prior experiences, with running
// per-(state, action) aggregates and the symbolic-action transition graph.
class ExperienceStore {
public:
    void record_step(const SymbolicState& state, const SymbolicAction& action,
                     const Action& concrete, double reward, long long t, bool steered = false);
    void end_sequence();

    const std::vector<Experience>& experiences_for(const std::string& state_key) const;
    std::optional<PairAggregate> aggregate_for(const std::string& state_key,
                                               const std::string& action_key) const;
    std::optional<double> mean_reward(const std::string& state_key,
                                      const std::string& action_key) const;

    // Recorded state key minimizing the ordinal term distance to `state`;
    // ties broken by most recent, absent when min distance > max_distance.
    std::optional<std::string> nearest_state(const SymbolicState& state,
                                             double max_distance) const;

    const KnowledgeGraph& graph() const { return graph_; }
    std::int64_t size() const { return static_cast<std::int64_t>(log_.size()); }
    const std::vector<Experience>& log() const { return log_; }

    // Serialized quartile-tracker states, so runs can resume deterministically.
    void set_tracker_state(nlohmann::json trackers) { trackers_ = std::move(trackers); }
    const nlohmann::json& tracker_state() const { return trackers_; }

    void save(const std::string& path) const;
    static ExperienceStore load(const std::string& path);
    nlohmann::json to_json() const;
    static ExperienceStore from_json(const nlohmann::json& j);

private:
    std::vector<Experience> log_;  // append-only, insertion order
    std::map<std::string, std::vector<Experience>> by_state_;
    std::map<std::pair<std::string, std::string>, PairAggregate> aggregates_;
    std::map<std::string, long long> last_seen_;  // state key -> most recent t
    KnowledgeGraph graph_;
    int sequence_ = 0;
    nlohmann::json trackers_ = nlohmann::json::object();
};

// Ordinal distance between two symbolic states: over shared subjects,
// 1 per predicate mismatch plus |ordinal(Q) - ordinal(Q')| / 4.
double state_distance(const SymbolicState& a, const SymbolicState& b);

}  // namespace symbxrl
