#include "symbxrl/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symbxrl {

nlohmann::json action_to_json(const Action& action) {
    return std::visit([](const auto& a) -> nlohmann::json {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, A1Action>)
            return {{"prb", a.prb}, {"policy", a.policy}};
        else
            return {{"mask", a.mask}};
    }, action);
}

Action action_from_json(const nlohmann::json& j) {
    if (j.contains("mask")) {
        A2Action a;
        j.at("mask").get_to(a.mask);
        return a;
    }
    A1Action a;
    j.at("prb").get_to(a.prb);
    j.at("policy").get_to(a.policy);
    return a;
}

nlohmann::json step_to_json(const Step& step) {
    nlohmann::json state = nlohmann::json::object();
    for (const auto& [kpi, rows] : step.state) {
        if (rows.size() == 1)
            state[kpi] = rows[0];  // A2 layout: flat per-user array
        else
            state[kpi] = rows;
    }
    nlohmann::json j = {{"t", step.t},
                        {"state", state},
                        {"action", action_to_json(step.action)},
                        {"reward", step.reward}};
    if (!step.meta.empty()) j["meta"] = step.meta;
    return j;
}

Step step_from_json(const nlohmann::json& j, const Schema& schema) {
    Step step;
    step.t = j.at("t").get<long long>();
    step.reward = j.at("reward").get<double>();
    bool is_a2 = std::holds_alternative<SchemaA2>(schema);
    for (auto it = j.at("state").begin(); it != j.at("state").end(); ++it) {
        if (is_a2)
            step.state[it.key()] = {it.value().get<std::vector<double>>()};
        else
            step.state[it.key()] = it.value().get<std::vector<std::vector<double>>>();
    }
    step.action = action_from_json(j.at("action"));
    if (j.contains("meta")) j.at("meta").get_to(step.meta);
    return step;
}

namespace {

nlohmann::json terms_to_json(const TermSet& set) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& term : set.terms) arr.push_back(render_term(term));
    return arr;
}

TermSet terms_from_json(const nlohmann::json& arr) {
    std::vector<SymbolicTerm> terms;
    for (const auto& s : arr) terms.push_back(parse_term(s.get<std::string>()));
    return TermSet(std::move(terms));
}

}  // namespace

nlohmann::json symbolic_step_to_json(const SymbolicStep& step) {
    nlohmann::json j = {{"t", step.t},
                        {"state_terms", terms_to_json(step.state)},
                        {"action_terms", terms_to_json(step.action)},
                        {"effect_terms", step.effect ? terms_to_json(*step.effect)
                                                     : nlohmann::json::array()}};
    if (!step.meta.empty()) j["meta"] = step.meta;
    return j;
}

SymbolicStep symbolic_step_from_json(const nlohmann::json& j) {
    SymbolicStep step;
    step.t = j.at("t").get<long long>();
    step.state = terms_from_json(j.at("state_terms"));
    step.action = terms_from_json(j.at("action_terms"));
    if (!j.at("effect_terms").empty()) step.effect = terms_from_json(j.at("effect_terms"));
    if (j.contains("meta")) j.at("meta").get_to(step.meta);
    return step;
}

std::vector<Step> read_trace(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
    std::vector<Step> steps;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            steps.push_back(step_from_json(nlohmann::json::parse(line), schema));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return steps;
}

void write_trace(const std::string& path, const std::vector<Step>& steps) {
    std::string out;
    for (const auto& step : steps) {
        out += step_to_json(step).dump();
        out += '\n';
    }
    atomic_write(path, out);
}

SymbolicTrace read_symbolic_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open symbolic trace '" + path + "'");
    SymbolicTrace trace;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            trace.steps.push_back(symbolic_step_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return trace;
}

void write_symbolic_trace(const std::string& path, const SymbolicTrace& trace) {
    std::string out;
    for (const auto& step : trace.steps) {
        out += symbolic_step_to_json(step).dump();
        out += '\n';
    }
    atomic_write(path, out);
}

void atomic_write(const std::string& path, const std::string& content) {
    std::filesystem::path target(path);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace symbxrl
