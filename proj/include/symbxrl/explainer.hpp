#pragma once

#include <map>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"
#include "symbxrl/store.hpp"
#include "symbxrl/symbolizer.hpp"

namespace symbxrl {

struct FrequencyTable {
    std::map<std::string, std::int64_t> counts;
    std::int64_t total = 0;

    double probability(const std::string& key) const {
        auto it = counts.find(key);
        if (it == counts.end() || total == 0) return 0.0;
        return static_cast<double>(it->second) / static_cast<double>(total);
    }
};

enum class Normalization { Joint, Row, Column };

struct DensityMap {
    Normalization mode = Normalization::Joint;
    std::map<std::pair<std::string, std::string>, std::int64_t> counts;  // (row, col)
    std::map<std::string, std::int64_t> row_marginals;
    std::map<std::string, std::int64_t> col_marginals;
    std::int64_t total = 0;

    double value(const std::string& row, const std::string& col) const;
};

// A term filter selects terms by subject: empty matches everything, otherwise
// the subject must equal the filter or end with "@" + filter (slice or group).
bool subject_matches(const std::string& subject, const std::string& filter);

FrequencyTable effect_distribution(const SymbolicTrace& trace, const std::string& filter = "");
FrequencyTable state_term_distribution(const SymbolicTrace& trace, const std::string& filter = "");
FrequencyTable action_term_distribution(const SymbolicTrace& trace, const std::string& filter = "");

// One table per distinct value of the given metadata key (e.g. channel x speed
// labels carried in the trace), over state terms passing the filter.
std::map<std::string, FrequencyTable> state_distribution_by(const SymbolicTrace& trace,
                                                            const std::string& filter,
                                                            const std::string& meta_key);

// Co-occurrence of per-step decision and effect terms at the same t.
DensityMap decision_effect_density(const SymbolicTrace& trace,
                                   const std::string& decision_filter,
                                   const std::string& effect_filter,
                                   Normalization mode = Normalization::Joint);

// Signed per-key deltas probability(B) - probability(A), sorted by |delta|
// descending (key ascending on ties).
std::vector<std::pair<std::string, double>> compare_distributions(const FrequencyTable& a,
                                                                  const FrequencyTable& b);

// Builds a KG over per-step action keys; `projection` non-empty restricts each
// action to the term whose subject matches it (e.g. "g0" for a per-group KG).
KnowledgeGraph build_kg(const SymbolicTrace& trace, const std::string& projection = "");

std::string export_kg_dot(const KnowledgeGraph& kg);
std::string export_kg_json(const KnowledgeGraph& kg);

std::string frequency_table_csv(const FrequencyTable& table);
std::string density_map_csv(const DensityMap& map);
std::string deltas_csv(const std::vector<std::pair<std::string, double>>& deltas);

}  // namespace symbxrl
