#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"
#include "symbxrl/quantile.hpp"

#include <nlohmann/json_fwd.hpp>

namespace symbxrl {

// Per-(KPI, slice) means for A1; keys like "tx_brate@embb".
std::map<std::string, double> aggregate_a1(const Step& step, const SchemaA1& schema);
// Per-(KPI, group) means for A2, G excluded (it is the grouping key); keys like "MSE@g0".
std::map<std::string, double> aggregate_a2(const Step& step, const SchemaA2& schema);

struct SymbolizerConfig {
    double eps_rel = 0.01;
    double abs_floor = 1e-9;
};

// Running state of the symbolic representation generator: quartile trackers
// and previous values per monitored subject, plus the previous concrete action.
class SymbolizerState {
public:
    SymbolizerState(const Schema& schema, SymbolizerConfig config = {});

    const SymbolizerConfig& config() const { return config_; }

    // Scalar direction predicate + quartile label; observes cur into the
    // subject's tracker and advances the previous value.
    SymbolicTerm symbolize_scalar(const std::string& subject, double cur);

    SymbolicState symbolize_state(const Step& step);
    SymbolicAction symbolize_action(const Action& action);

    QuartileTracker& tracker(const std::string& subject);

    nlohmann::json trackers_to_json() const;
    void trackers_from_json(const nlohmann::json& j);

private:
    SymbolicAction symbolize_action_a1(const A1Action& action);
    SymbolicAction symbolize_action_a2(const A2Action& action);

    Schema schema_;
    SymbolizerConfig config_;
    std::map<std::string, QuartileTracker> trackers_;
    std::map<std::string, double> prev_;           // previous aggregated value per subject
    std::optional<Action> prev_action_;
};

struct SymbolicTrace {
    std::vector<SymbolicStep> steps;
};

SymbolicTrace symbolize_trajectory(const Trajectory& traj, SymbolizerState& state);

// Closed-form vocabulary sizes; identifiers: "A1-symb", "A1-explora",
// "A2-symb", "A2-explora".
long long vocabulary_size(const std::string& id);

}  // namespace symbxrl
