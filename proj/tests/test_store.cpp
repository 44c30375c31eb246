#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "symbxrl/store.hpp"

using namespace symbxrl;
using namespace symbxrl::testing;

namespace {

SymbolicState state_of(const std::string& key) { return parse_term_set(key); }

Action concrete_mask(std::vector<int> mask) { return A2Action{std::move(mask)}; }

std::string random_state_key(std::mt19937_64& rng) {
    const char* preds[] = {"inc", "dec", "const"};
    const char* qs[] = {"Q1", "Q2", "Q3", "Q4", "MAX"};
    std::uniform_int_distribution<int> p(0, 2), q(0, 4);
    std::string a = std::string(preds[p(rng)]) + "(MSE@g0," + qs[q(rng)] + ")";
    std::string b = std::string(preds[p(rng)]) + "(DTU@g0," + qs[q(rng)] + ")";
    return TermSet({parse_term(a), parse_term(b)}).key();
}

}  // namespace

TEST_CASE("knowledge graph counts for the sequence A,B,B,A") {
    KnowledgeGraph kg;
    for (const char* k : {"A", "B", "B", "A"}) kg.ingest(k);
    kg.end_sequence();

    CHECK(kg.nodes().at("A") == 2);
    CHECK(kg.nodes().at("B") == 2);
    CHECK(kg.node_total() == 4);
    CHECK(kg.edge_total() == 3);
    CHECK(kg.edges().at({"A", "B"}) == 1);
    CHECK(kg.edges().at({"B", "B"}) == 1);
    CHECK(kg.edges().at({"B", "A"}) == 1);
    CHECK(kg.edge_probability("B", "B") == doctest::Approx(0.5));
    CHECK(kg.edge_probability("B", "A") == doctest::Approx(0.5));
    CHECK(kg.edge_probability("A", "B") == doctest::Approx(1.0));
    CHECK(kg.edge_probability("A", "A") == 0.0);
}

TEST_CASE("end_sequence breaks edges between sequences") {
    KnowledgeGraph kg;
    kg.ingest("A");
    kg.end_sequence();
    kg.ingest("B");
    kg.end_sequence();
    CHECK(kg.node_total() == 2);
    CHECK(kg.edge_total() == 0);
}

TEST_CASE("per-pair aggregates: count, mean, best") {
    ExperienceStore store;
    SymbolicState s = state_of("inc(MSE@g0,Q2)");
    SymbolicAction a = parse_term_set("sched(g0,Q2,50)");
    store.record_step(s, a, concrete_mask({1, 0, 0, 0, 0, 0, 0}), 3.0, 0);
    store.record_step(s, a, concrete_mask({0, 1, 0, 0, 0, 0, 0}), 5.0, 1);

    auto agg = store.aggregate_for(s.key(), a.key());
    REQUIRE(agg.has_value());
    CHECK(agg->count == 2);
    CHECK(agg->mean_reward == doctest::Approx(4.0));
    CHECK(agg->best_reward == doctest::Approx(5.0));
    CHECK(std::get<A2Action>(agg->best_concrete).mask == std::vector<int>{0, 1, 0, 0, 0, 0, 0});
    CHECK(store.mean_reward(s.key(), a.key()) == doctest::Approx(4.0));
    CHECK(!store.aggregate_for(s.key(), "noSched(g0)").has_value());
    CHECK(!store.mean_reward("unknown", a.key()).has_value());
}

TEST_CASE("experiences_for returns insertion order; missing key is empty") {
    ExperienceStore store;
    SymbolicState s = state_of("dec(DTU@g1,Q1)");
    for (int t = 0; t < 5; ++t)
        store.record_step(s, parse_term_set("noSched(g1)"), concrete_mask({0, 0, 0, 0, 0, 0, 0}),
                          static_cast<double>(t), t);
    const auto& xs = store.experiences_for(s.key());
    REQUIRE(xs.size() == 5);
    for (size_t i = 0; i < xs.size(); ++i) CHECK(xs[i].t == static_cast<long long>(i));
    CHECK(store.experiences_for("never-seen").empty());
}

TEST_CASE("aggregates agree with a brute-force scan over 1000 records") {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> pick_s(0, 5), pick_a(0, 3);
    std::uniform_real_distribution<double> rew(-2.0, 2.0);
    const char* states[] = {"inc(MSE@g0,Q1)", "inc(MSE@g0,Q2)", "dec(MSE@g0,Q3)",
                            "const(MSE@g0,Q4)", "dec(MSE@g0,MAX)", "inc(MSE@g0,Q4)"};
    const char* actions[] = {"noSched(g0)", "sched(g0,Q1,25)", "sched(g0,Q3,75)",
                             "sched(g0,MAX,100)"};

    ExperienceStore store;
    struct Rec { int s, a; double r; };
    std::vector<Rec> recs;
    for (int t = 0; t < 1000; ++t) {
        Rec rec{pick_s(rng), pick_a(rng), rew(rng)};
        recs.push_back(rec);
        store.record_step(state_of(states[rec.s]), parse_term_set(actions[rec.a]),
                          concrete_mask(random_mask(rng)), rec.r, t);
    }
    CHECK(store.size() == 1000);

    for (int s = 0; s < 6; ++s) {
        for (int a = 0; a < 4; ++a) {
            // Oracle: linear scan over the raw record list.
            std::int64_t n = 0;
            double sum = 0.0, best = -1e300;
            for (const auto& r : recs) {
                if (r.s != s || r.a != a) continue;
                ++n;
                sum += r.r;
                best = std::max(best, r.r);
            }
            auto agg = store.aggregate_for(state_of(states[s]).key(), actions[a]);
            if (n == 0) {
                CHECK(!agg.has_value());
            } else {
                REQUIRE(agg.has_value());
                CHECK(agg->count == n);
                CHECK(agg->mean_reward == doctest::Approx(sum / static_cast<double>(n)));
                CHECK(agg->best_reward == doctest::Approx(best));
            }
        }
    }
}

TEST_CASE("state_distance goldens") {
    auto a = state_of("inc(MSE@g0,Q2);inc(DTU@g0,Q2)");
    CHECK(state_distance(a, a) == 0.0);

    auto b = state_of("inc(MSE@g0,Q3);inc(DTU@g0,Q2)");
    CHECK(state_distance(a, b) == doctest::Approx(0.25));  // one quartile step

    auto c = state_of("dec(MSE@g0,Q2);inc(DTU@g0,Q2)");
    CHECK(state_distance(a, c) == doctest::Approx(1.0));  // predicate flip

    auto d = state_of("dec(MSE@g0,MAX);inc(DTU@g0,Q2)");
    CHECK(state_distance(a, d) == doctest::Approx(1.75));  // flip + |5-2|/4

    CHECK(state_distance(a, b) == state_distance(b, a));
}

TEST_CASE("nearest_state: goldens and recency tie-break") {
    ExperienceStore store;
    auto rec = [&](const std::string& key, long long t) {
        store.record_step(state_of(key), parse_term_set("noSched(g0)"),
                          concrete_mask({0, 0, 0, 0, 0, 0, 0}), 0.0, t);
    };
    rec("inc(MSE@g0,Q1)", 0);
    rec("inc(MSE@g0,Q4)", 1);

    // Exact hit at distance 0.
    CHECK(store.nearest_state(state_of("inc(MSE@g0,Q1)"), 1.0) == "inc(MSE@g0,Q1)");
    // Q2 is 0.25 from Q1 and 0.5 from Q4.
    CHECK(store.nearest_state(state_of("inc(MSE@g0,Q2)"), 1.0) == "inc(MSE@g0,Q1)");
    // Too far: predicate flip + full quartile span exceeds the bound.
    CHECK(!store.nearest_state(state_of("dec(MSE@g0,MAX)"), 0.5).has_value());

    // Equidistant candidates resolve to the most recently seen.
    rec("inc(MSE@g0,Q3)", 2);
    rec("inc(MSE@g0,Q1)", 3);  // refresh Q1 so it is newer than Q3
    CHECK(store.nearest_state(state_of("inc(MSE@g0,Q2)"), 1.0) == "inc(MSE@g0,Q1)");
}

TEST_CASE("nearest_state matches a brute-force argmin over 500 states") {
    std::mt19937_64 rng(211);
    ExperienceStore store;
    std::vector<std::string> keys;
    for (int t = 0; t < 500; ++t) {
        std::string key = random_state_key(rng);
        keys.push_back(key);
        store.record_step(state_of(key), parse_term_set("noSched(g0)"),
                          concrete_mask({0, 0, 0, 0, 0, 0, 0}), 0.0, t);
    }
    for (int probe = 0; probe < 50; ++probe) {
        SymbolicState q = state_of(random_state_key(rng));
        double best = 1e300;
        for (const auto& key : keys) best = std::min(best, state_distance(q, state_of(key)));
        auto got = store.nearest_state(q, 1e300);
        REQUIRE(got.has_value());
        CHECK(state_distance(q, state_of(*got)) == doctest::Approx(best));
    }
}

TEST_CASE("knowledge-graph edge probabilities are normalized (fuzz)") {
    std::mt19937_64 rng(307);
    std::uniform_int_distribution<int> pick(0, 4);
    KnowledgeGraph kg;
    for (int seq = 0; seq < 20; ++seq) {
        for (int i = 0; i < 100; ++i) kg.ingest("a" + std::to_string(pick(rng)));
        kg.end_sequence();
    }
    std::int64_t node_sum = 0;
    for (const auto& [key, n] : kg.nodes()) node_sum += n;
    CHECK(node_sum == kg.node_total());
    CHECK(kg.node_total() == 2000);
    CHECK(kg.edge_total() == 20 * 99);

    std::map<std::string, double> out_prob;
    for (const auto& [edge, n] : kg.edges()) {
        CHECK(n > 0);
        out_prob[edge.first] += kg.edge_probability(edge.first, edge.second);
    }
    for (const auto& [src, p] : out_prob) CHECK(p == doctest::Approx(1.0));
}

TEST_CASE("store save/load round-trips the log, aggregates and graph") {
    std::mt19937_64 rng(401);
    ExperienceStore store;
    for (int t = 0; t < 200; ++t) {
        std::string skey = random_state_key(rng);
        auto mask = random_mask(rng);
        int count = 0;
        for (int i = 0; i < 3; ++i) count += mask[static_cast<size_t>(i)];
        std::string akey = count == 0
            ? "noSched(g0)"
            : "sched(g0,Q" + std::to_string(1 + count % 4) + "," +
                  std::to_string(percentage_of(count, 3)) + ")";
        store.record_step(state_of(skey), parse_term_set(akey), concrete_mask(mask),
                          std::uniform_real_distribution<double>(-1, 1)(rng), t, t % 7 == 0);
        if (t % 50 == 49) store.end_sequence();
    }
    store.end_sequence();
    store.set_tracker_state({{"count@g0", {{"p", 0.5}}}});

    std::string path = "store_roundtrip.json";
    store.save(path);
    ExperienceStore loaded = ExperienceStore::load(path);
    std::remove(path.c_str());

    CHECK(loaded.size() == store.size());
    CHECK(loaded.graph() == store.graph());
    CHECK(loaded.tracker_state() == store.tracker_state());
    CHECK(loaded.to_json() == store.to_json());
    for (const auto& exp : store.log()) {
        auto agg = loaded.aggregate_for(exp.state_key, exp.action_key);
        auto ref = store.aggregate_for(exp.state_key, exp.action_key);
        REQUIRE(agg.has_value());
        CHECK(agg->count == ref->count);
        CHECK(agg->mean_reward == doctest::Approx(ref->mean_reward));
    }
    // Sequence numbering continues where the saved run stopped: the last record
    // was in sequence 3 and two end_sequence calls followed, so the next is 5.
    CHECK(store.log().back().sequence == 3);
    loaded.record_step(state_of("inc(MSE@g0,Q1)"), parse_term_set("noSched(g0)"),
                       concrete_mask({0, 0, 0, 0, 0, 0, 0}), 0.0, 200);
    CHECK(loaded.log().back().sequence == 5);
}

TEST_CASE("store load rejects corrupt files") {
    std::string path = "store_corrupt.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS(ExperienceStore::load(path));
    std::remove(path.c_str());
    CHECK_THROWS(ExperienceStore::load("does_not_exist_anywhere.json"));
}
