#include "symbxrl/symbolizer.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace symbxrl {

std::map<std::string, double> aggregate_a1(const Step& step, const SchemaA1& schema) {
    std::map<std::string, double> means;
    for (const auto& kpi : schema.kpis) {
        const auto& rows = step.state.at(kpi);
        for (size_t l = 0; l < schema.slices.size(); ++l) {
            double sum = 0.0;
            for (double v : rows[l]) sum += v;
            means[kpi + "@" + schema.slices[l]] = sum / static_cast<double>(rows[l].size());
        }
    }
    return means;
}

std::map<std::string, double> aggregate_a2(const Step& step, const SchemaA2& schema) {
    std::map<std::string, double> means;
    for (const auto& kpi : schema.kpis) {
        if (kpi == "G") continue;  // grouping key, not averaged
        const auto& row = step.state.at(kpi)[0];
        for (int g = 0; g < schema.group_count(); ++g) {
            auto users = schema.users_of(g);
            if (users.empty()) throw std::invalid_argument("empty group g" + std::to_string(g));
            double sum = 0.0;
            for (int u : users) sum += row[static_cast<size_t>(u)];
            means[kpi + "@g" + std::to_string(g)] = sum / static_cast<double>(users.size());
        }
    }
    return means;
}

namespace {

Predicate direction(double prev, double cur, const SymbolizerConfig& cfg) {
    double bound = std::max(cfg.eps_rel * std::abs(prev), cfg.abs_floor);
    double delta = cur - prev;
    if (std::abs(delta) <= bound) return Predicate::Const;
    return delta > 0.0 ? Predicate::Inc : Predicate::Dec;
}

Predicate policy_predicate(const std::string& policy) {
    if (policy == "WF") return Predicate::ToWF;
    if (policy == "RR") return Predicate::ToRR;
    if (policy == "PF") return Predicate::ToPF;
    throw std::invalid_argument("unknown policy '" + policy + "'");
}

// MAX labels are enabled for A2 DTU and scheduled-count streams only.
bool max_enabled_for(const std::string& subject) {
    return subject.rfind("DTU@", 0) == 0 || subject.rfind("count@", 0) == 0;
}

}  // namespace

SymbolizerState::SymbolizerState(const Schema& schema, SymbolizerConfig config)
    : schema_(schema), config_(config) {}

QuartileTracker& SymbolizerState::tracker(const std::string& subject) {
    auto it = trackers_.find(subject);
    if (it == trackers_.end())
        it = trackers_.emplace(subject, QuartileTracker(max_enabled_for(subject))).first;
    return it->second;
}

SymbolicTerm SymbolizerState::symbolize_scalar(const std::string& subject, double cur) {
    double prev = 0.0;  // neutral baseline before the first observation
    if (auto it = prev_.find(subject); it != prev_.end()) prev = it->second;

    auto& trk = tracker(subject);
    trk.observe(cur);

    SymbolicTerm term;
    term.pred = direction(prev, cur, config_);
    term.subject = subject;
    term.quartile = trk.label(cur);
    prev_[subject] = cur;
    return term;
}

SymbolicState SymbolizerState::symbolize_state(const Step& step) {
    std::map<std::string, double> means = std::visit([&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SchemaA1>)
            return aggregate_a1(step, s);
        else
            return aggregate_a2(step, s);
    }, schema_);

    std::vector<SymbolicTerm> terms;
    for (const auto& [subject, value] : means) terms.push_back(symbolize_scalar(subject, value));
    return SymbolicState(std::move(terms));
}

SymbolicAction SymbolizerState::symbolize_action(const Action& action) {
    SymbolicAction result = std::visit([&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, A1Action>)
            return symbolize_action_a1(a);
        else
            return symbolize_action_a2(a);
    }, action);
    prev_action_ = action;
    return result;
}

SymbolicAction SymbolizerState::symbolize_action_a1(const A1Action& action) {
    const auto& schema = std::get<SchemaA1>(schema_);
    A1Action prev;  // neutral: prb = 0, policy unset
    prev.prb = {0, 0, 0};
    if (prev_action_) prev = std::get<A1Action>(*prev_action_);

    std::vector<SymbolicTerm> terms;
    for (size_t l = 0; l < schema.slices.size(); ++l) {
        const std::string& slice = schema.slices[l];
        int before = prev.prb[l];
        int after = action.prb[l];
        if (after < 0 || after > SchemaA1::kPrbTotal)
            throw std::invalid_argument("PRB out of range");

        SymbolicTerm prb_term;
        prb_term.subject = "PRB@" + slice;
        if (after == before) {
            prb_term.pred = Predicate::Const;
            prb_term.cat_start = SchemaA1::category(after);
        } else {
            prb_term.pred = after > before ? Predicate::Inc : Predicate::Dec;
            prb_term.cat_start = SchemaA1::category(before);
            prb_term.cat_final = SchemaA1::category(after);
        }
        terms.push_back(prb_term);

        SymbolicTerm pol_term;
        pol_term.pred = policy_predicate(action.policy[l]);
        pol_term.subject = "sched@" + slice;
        terms.push_back(pol_term);
    }
    return SymbolicAction(std::move(terms));
}

SymbolicAction SymbolizerState::symbolize_action_a2(const A2Action& action) {
    const auto& schema = std::get<SchemaA2>(schema_);
    if (action.mask.size() != SchemaA2::kUsers) throw std::invalid_argument("bad mask length");

    std::vector<SymbolicTerm> terms;
    for (int g = 0; g < schema.group_count(); ++g) {
        int count = action.scheduled_in(schema, g);
        std::string group = "g" + std::to_string(g);
        auto& trk = tracker("count@" + group);
        trk.observe(static_cast<double>(count));

        SymbolicTerm term;
        term.subject = group;
        if (count == 0) {
            term.pred = Predicate::NoSched;
        } else {
            term.pred = Predicate::Sched;
            term.quartile = trk.label(static_cast<double>(count));
            term.percentage = percentage_of(count, schema.group_sizes[static_cast<size_t>(g)]);
        }
        terms.push_back(term);
    }
    return SymbolicAction(std::move(terms));
}

nlohmann::json SymbolizerState::trackers_to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [subject, trk] : trackers_) j[subject] = trk.to_json();
    return j;
}

void SymbolizerState::trackers_from_json(const nlohmann::json& j) {
    trackers_.clear();
    for (auto it = j.begin(); it != j.end(); ++it)
        trackers_.emplace(it.key(), QuartileTracker::from_json(it.value()));
}

SymbolicTrace symbolize_trajectory(const Trajectory& traj, SymbolizerState& state) {
    SymbolicTrace trace;
    for (const auto& step : traj.steps) {
        SymbolicStep sym;
        sym.t = step.t;
        sym.state = state.symbolize_state(step);
        sym.action = state.symbolize_action(step.action);
        sym.meta = step.meta;
        trace.steps.push_back(std::move(sym));
    }
    // Effect at t = symbolic state at t+1 attributed to the action at t.
    for (size_t i = 0; i + 1 < trace.steps.size(); ++i)
        trace.steps[i].effect = trace.steps[i + 1].state;
    return trace;
}

long long vocabulary_size(const std::string& id) {
    if (id == "A2-explora") return 1LL << SchemaA2::kUsers;  // 2^7 = 128
    if (id == "A1-explora") {
        // C(PRB-1, 2) * |SP|^|L| = C(49,2) * 27 = 31,752
        long long pairs = 49LL * 48LL / 2LL;
        return pairs * 27LL;
    }
    if (id == "A2-symb") return 3LL * 5LL * 5LL;  // |G| * |Q| * |Percentage| = 75
    if (id == "A1-symb") return 3LL * 3LL * 10LL * 3LL;  // |L| * |Pred| * |Cat| * |toPolicy| = 270
    throw std::invalid_argument("unknown vocabulary identifier '" + id + "'");
}

}  // namespace symbxrl
