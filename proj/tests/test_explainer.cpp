#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "symbxrl/explainer.hpp"
#include "symbxrl/symbolizer.hpp"

using namespace symbxrl;
using namespace symbxrl::testing;

namespace {

SymbolicTrace random_a2_trace(std::uint64_t seed, int length) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 5.0);
    std::vector<Step> steps;
    for (int t = 0; t < length; ++t) {
        auto step = make_a2_step(t, random_mask(rng));
        for (auto& v : step.state["MSE"][0]) v = unif(rng);
        for (auto& v : step.state["DTU"][0]) v = unif(rng);
        step.meta["channel"] = (t % 3 == 0) ? "LOS" : "NLOS";
        steps.push_back(step);
    }
    SymbolizerState sym(SchemaA2{});
    return symbolize_trajectory(validate_trajectory(std::move(steps), SchemaA2{}), sym);
}

}  // namespace

TEST_CASE("subject_matches: exact, slice suffix, empty filter") {
    CHECK(subject_matches("anything", ""));
    CHECK(subject_matches("g1", "g1"));
    CHECK(subject_matches("MSE@g1", "g1"));
    CHECK(subject_matches("tx_brate@embb", "embb"));
    CHECK(!subject_matches("MSE@g1", "g0"));
    CHECK(!subject_matches("MSE@g1", "MSE"));
    CHECK(!subject_matches("g1", "MSE@g1"));
}

TEST_CASE("effect distribution golden on a hand-built trace") {
    // Three steps; two carry effects. Effect terms over one subject:
    // inc appears twice, dec once -> probabilities 2/3 and 1/3.
    SymbolicTrace trace;
    for (int t = 0; t < 3; ++t) {
        SymbolicStep step;
        step.t = t;
        step.state = parse_term_set("const(MSE@g0,Q1)");
        step.action = parse_term_set("noSched(g0)");
        trace.steps.push_back(step);
    }
    trace.steps[0].effect = parse_term_set("inc(MSE@g0,Q2);inc(DTU@g0,Q1)");
    trace.steps[1].effect = parse_term_set("dec(MSE@g0,Q1);inc(DTU@g0,Q2)");

    FrequencyTable mse = effect_distribution(trace, "MSE@g0");
    CHECK(mse.total == 2);
    CHECK(mse.probability("inc(MSE@g0,Q2)") == doctest::Approx(0.5));
    CHECK(mse.probability("dec(MSE@g0,Q1)") == doctest::Approx(0.5));

    FrequencyTable all = effect_distribution(trace);
    CHECK(all.total == 4);
    CHECK(all.counts.at("inc(MSE@g0,Q2)") == 1);
    CHECK(all.probability("never-seen") == 0.0);
}

TEST_CASE("distributions agree with a brute-force histogram (fuzz)") {
    SymbolicTrace trace = random_a2_trace(5, 200);

    // Oracle: flat recount over the trace.
    std::map<std::string, std::int64_t> state_oracle, action_oracle, effect_oracle;
    std::int64_t s_total = 0, a_total = 0, e_total = 0;
    for (const auto& step : trace.steps) {
        for (const auto& term : step.state.terms) {
            ++state_oracle[render_term(term)];
            ++s_total;
        }
        for (const auto& term : step.action.terms) {
            ++action_oracle[render_term(term)];
            ++a_total;
        }
        if (step.effect)
            for (const auto& term : step.effect->terms) {
                ++effect_oracle[render_term(term)];
                ++e_total;
            }
    }
    CHECK(state_term_distribution(trace).counts == state_oracle);
    CHECK(state_term_distribution(trace).total == s_total);
    CHECK(action_term_distribution(trace).counts == action_oracle);
    CHECK(action_term_distribution(trace).total == a_total);
    CHECK(effect_distribution(trace).counts == effect_oracle);
    CHECK(effect_distribution(trace).total == e_total);

    // Probabilities over any table sum to 1.
    double sum = 0.0;
    for (const auto& [k, _] : state_oracle) sum += state_term_distribution(trace).probability(k);
    CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("per-metadata split partitions the state counts") {
    SymbolicTrace trace = random_a2_trace(6, 120);
    auto split = state_distribution_by(trace, "", "channel");
    REQUIRE(split.count("LOS") == 1);
    REQUIRE(split.count("NLOS") == 1);
    std::int64_t total = 0;
    for (const auto& [_, table] : split) total += table.total;
    CHECK(total == state_term_distribution(trace).total);
}

TEST_CASE("density map normalizations") {
    SymbolicTrace trace = random_a2_trace(7, 150);

    DensityMap joint = decision_effect_density(trace, "g0", "MSE@g0", Normalization::Joint);
    REQUIRE(joint.total > 0);
    double jsum = 0.0;
    for (const auto& [cell, _] : joint.counts) jsum += joint.value(cell.first, cell.second);
    CHECK(jsum == doctest::Approx(1.0));

    DensityMap row = decision_effect_density(trace, "g0", "MSE@g0", Normalization::Row);
    std::map<std::string, double> row_sums;
    for (const auto& [cell, _] : row.counts) row_sums[cell.first] += row.value(cell.first, cell.second);
    for (const auto& [_, s] : row_sums) CHECK(s == doctest::Approx(1.0));

    DensityMap col = decision_effect_density(trace, "g0", "MSE@g0", Normalization::Column);
    std::map<std::string, double> col_sums;
    for (const auto& [cell, _] : col.counts) col_sums[cell.second] += col.value(cell.first, cell.second);
    for (const auto& [_, s] : col_sums) CHECK(s == doctest::Approx(1.0));

    // Marginals are consistent with the cell counts.
    std::int64_t row_marg = 0;
    for (const auto& [_, n] : joint.row_marginals) row_marg += n;
    CHECK(row_marg == joint.total);
}

TEST_CASE("compare_distributions: signed deltas sorted by magnitude") {
    FrequencyTable a, b;
    a.counts = {{"x", 3}, {"y", 1}};
    a.total = 4;
    b.counts = {{"y", 1}, {"z", 1}};
    b.total = 2;

    auto deltas = compare_distributions(a, b);
    REQUIRE(deltas.size() == 3);
    CHECK(deltas[0].first == "x");
    CHECK(deltas[0].second == doctest::Approx(-0.75));
    CHECK(deltas[1].first == "z");
    CHECK(deltas[1].second == doctest::Approx(0.5));
    CHECK(deltas[2].first == "y");
    CHECK(deltas[2].second == doctest::Approx(0.25));
    for (size_t i = 1; i < deltas.size(); ++i)
        CHECK(std::abs(deltas[i - 1].second) >= std::abs(deltas[i].second));
}

TEST_CASE("build_kg over the sequence A,B,B,A via full action keys") {
    SymbolicTrace trace;
    const char* keys[] = {"noSched(g0)", "sched(g0,Q1,25)", "sched(g0,Q1,25)", "noSched(g0)"};
    for (int t = 0; t < 4; ++t) {
        SymbolicStep step;
        step.t = t;
        step.action = parse_term_set(keys[t]);
        trace.steps.push_back(step);
    }
    KnowledgeGraph kg = build_kg(trace);
    CHECK(kg.nodes().size() == 2);
    CHECK(kg.edges().size() == 3);
    CHECK(kg.edge_probability("sched(g0,Q1,25)", "sched(g0,Q1,25)") == doctest::Approx(0.5));

    std::string json = export_kg_json(kg);
    CHECK(json.find("\"count\": 2") != std::string::npos);
    std::string dot = export_kg_dot(kg);
    CHECK(dot.find("digraph kg {") == 0);
    CHECK(dot.find("\"noSched(g0)\" -> \"sched(g0,Q1,25)\"") != std::string::npos);
}

TEST_CASE("projected KG restricts to one group's terms") {
    SymbolicTrace trace = random_a2_trace(11, 100);
    KnowledgeGraph kg = build_kg(trace, "g1");
    CHECK(kg.node_total() == 100);  // exactly one g1 term per step
    for (const auto& [key, _] : kg.nodes()) {
        SymbolicTerm term = parse_term(key);
        CHECK(term.subject == "g1");
    }
}

TEST_CASE("exports are byte-stable across rebuilds") {
    SymbolicTrace t1 = random_a2_trace(13, 300);
    SymbolicTrace t2 = random_a2_trace(13, 300);
    CHECK(export_kg_dot(build_kg(t1)) == export_kg_dot(build_kg(t2)));
    CHECK(export_kg_json(build_kg(t1)) == export_kg_json(build_kg(t2)));
    CHECK(frequency_table_csv(effect_distribution(t1)) ==
          frequency_table_csv(effect_distribution(t2)));
    CHECK(density_map_csv(decision_effect_density(t1, "", "")) ==
          density_map_csv(decision_effect_density(t2, "", "")));
}

TEST_CASE("csv shapes") {
    FrequencyTable table;
    table.counts = {{"a", 1}, {"b", 3}};
    table.total = 4;
    CHECK(frequency_table_csv(table) == "key,count,prob\na,1,0.25\nb,3,0.75\n");

    auto deltas = compare_distributions(table, table);
    std::string csv = deltas_csv(deltas);
    CHECK(csv.rfind("key,delta\n", 0) == 0);
    CHECK(csv.find("a,0\n") != std::string::npos);
}
