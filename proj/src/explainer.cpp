#include "symbxrl/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace symbxrl {

bool subject_matches(const std::string& subject, const std::string& filter) {
    if (filter.empty() || subject == filter) return true;
    std::string suffix = "@" + filter;
    return subject.size() > suffix.size() &&
           subject.compare(subject.size() - suffix.size(), suffix.size(), suffix) == 0;
}

namespace {

std::string format_prob(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

FrequencyTable term_distribution(const SymbolicTrace& trace, const std::string& filter,
                                 const TermSet SymbolicStep::* member) {
    FrequencyTable table;
    for (const auto& step : trace.steps) {
        for (const auto& term : (step.*member).terms) {
            if (!subject_matches(term.subject, filter)) continue;
            ++table.counts[render_term(term)];
            ++table.total;
        }
    }
    return table;
}

}  // namespace

FrequencyTable effect_distribution(const SymbolicTrace& trace, const std::string& filter) {
    FrequencyTable table;
    for (const auto& step : trace.steps) {
        if (!step.effect) continue;
        for (const auto& term : step.effect->terms) {
            if (!subject_matches(term.subject, filter)) continue;
            ++table.counts[render_term(term)];
            ++table.total;
        }
    }
    return table;
}

FrequencyTable state_term_distribution(const SymbolicTrace& trace, const std::string& filter) {
    return term_distribution(trace, filter, &SymbolicStep::state);
}

FrequencyTable action_term_distribution(const SymbolicTrace& trace, const std::string& filter) {
    return term_distribution(trace, filter, &SymbolicStep::action);
}

std::map<std::string, FrequencyTable> state_distribution_by(const SymbolicTrace& trace,
                                                            const std::string& filter,
                                                            const std::string& meta_key) {
    std::map<std::string, FrequencyTable> tables;
    for (const auto& step : trace.steps) {
        auto it = step.meta.find(meta_key);
        std::string label = it == step.meta.end() ? "(none)" : it->second;
        auto& table = tables[label];
        for (const auto& term : step.state.terms) {
            if (!subject_matches(term.subject, filter)) continue;
            ++table.counts[render_term(term)];
            ++table.total;
        }
    }
    return tables;
}

double DensityMap::value(const std::string& row, const std::string& col) const {
    auto it = counts.find({row, col});
    if (it == counts.end()) return 0.0;
    double c = static_cast<double>(it->second);
    switch (mode) {
        case Normalization::Joint:
            return total ? c / static_cast<double>(total) : 0.0;
        case Normalization::Row:
            return c / static_cast<double>(row_marginals.at(row));
        case Normalization::Column:
            return c / static_cast<double>(col_marginals.at(col));
    }
    return 0.0;
}

DensityMap decision_effect_density(const SymbolicTrace& trace, const std::string& decision_filter,
                                   const std::string& effect_filter, Normalization mode) {
    DensityMap map;
    map.mode = mode;
    for (const auto& step : trace.steps) {
        if (!step.effect) continue;
        for (const auto& d : step.action.terms) {
            if (!subject_matches(d.subject, decision_filter)) continue;
            for (const auto& e : step.effect->terms) {
                if (!subject_matches(e.subject, effect_filter)) continue;
                ++map.counts[{render_term(d), render_term(e)}];
                ++map.row_marginals[render_term(d)];
                ++map.col_marginals[render_term(e)];
                ++map.total;
            }
        }
    }
    return map;
}

std::vector<std::pair<std::string, double>> compare_distributions(const FrequencyTable& a,
                                                                  const FrequencyTable& b) {
    std::set<std::string> keys;
    for (const auto& [k, _] : a.counts) keys.insert(k);
    for (const auto& [k, _] : b.counts) keys.insert(k);
    std::vector<std::pair<std::string, double>> deltas;
    for (const auto& k : keys) deltas.emplace_back(k, b.probability(k) - a.probability(k));
    std::sort(deltas.begin(), deltas.end(), [](const auto& x, const auto& y) {
        if (std::abs(x.second) != std::abs(y.second)) return std::abs(x.second) > std::abs(y.second);
        return x.first < y.first;
    });
    return deltas;
}

KnowledgeGraph build_kg(const SymbolicTrace& trace, const std::string& projection) {
    KnowledgeGraph kg;
    for (const auto& step : trace.steps) {
        if (projection.empty()) {
            kg.ingest(step.action.key());
        } else {
            for (const auto& term : step.action.terms)
                if (subject_matches(term.subject, projection)) kg.ingest(render_term(term));
        }
    }
    kg.end_sequence();
    return kg;
}

namespace {

// Nodes by count descending then key; edges by (src, dst).
std::vector<std::pair<std::string, std::int64_t>> ordered_nodes(const KnowledgeGraph& kg) {
    std::vector<std::pair<std::string, std::int64_t>> nodes(kg.nodes().begin(), kg.nodes().end());
    std::sort(nodes.begin(), nodes.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return nodes;
}

}  // namespace

std::string export_kg_dot(const KnowledgeGraph& kg) {
    std::ostringstream out;
    out << "digraph kg {\n";
    for (const auto& [key, count] : ordered_nodes(kg))
        out << "  \"" << key << "\" [label=\"" << key << "\\n" << count << "\"];\n";
    for (const auto& [edge, count] : kg.edges()) {
        char prob[16];
        std::snprintf(prob, sizeof(prob), "%.2f", kg.edge_probability(edge.first, edge.second));
        out << "  \"" << edge.first << "\" -> \"" << edge.second << "\" [label=\"" << prob
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string export_kg_json(const KnowledgeGraph& kg) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [key, count] : ordered_nodes(kg)) {
        double prob = kg.node_total()
                          ? static_cast<double>(count) / static_cast<double>(kg.node_total())
                          : 0.0;
        nodes.push_back({{"id", key}, {"count", count}, {"prob", prob}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [edge, count] : kg.edges())
        edges.push_back({{"src", edge.first},
                         {"dst", edge.second},
                         {"count", count},
                         {"prob", kg.edge_probability(edge.first, edge.second)}});
    return nlohmann::json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

std::string frequency_table_csv(const FrequencyTable& table) {
    std::string out = "key,count,prob\n";
    for (const auto& [key, count] : table.counts)
        out += key + "," + std::to_string(count) + "," + format_prob(table.probability(key)) + "\n";
    return out;
}

std::string density_map_csv(const DensityMap& map) {
    std::string out = "row,col,value\n";
    for (const auto& [cell, _] : map.counts)
        out += cell.first + "," + cell.second + "," +
               format_prob(map.value(cell.first, cell.second)) + "\n";
    out += "marginal,,\n";
    for (const auto& [row, count] : map.row_marginals)
        out += "row:" + row + ",," +
               format_prob(static_cast<double>(count) / static_cast<double>(map.total)) + "\n";
    for (const auto& [col, count] : map.col_marginals)
        out += "col:" + col + ",," +
               format_prob(static_cast<double>(count) / static_cast<double>(map.total)) + "\n";
    return out;
}

std::string deltas_csv(const std::vector<std::pair<std::string, double>>& deltas) {
    std::string out = "key,delta\n";
    for (const auto& [key, delta] : deltas) out += key + "," + format_prob(delta) + "\n";
    return out;
}

}  // namespace symbxrl
