#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace symbxrl {

// ---------------------------------------------------------------------------
// Schemas

struct SchemaA1 {
    static constexpr int kMeasurements = 10;
    static constexpr int kPrbTotal = 50;
    static constexpr int kCategories = 10;  // width-5 intervals over [0, 50)
    std::vector<std::string> slices{"embb", "mmtc", "urllc"};
    std::vector<std::string> kpis{"tx_brate", "tx_pkts", "dl_buffer"};
    std::vector<std::string> policies{"WF", "RR", "PF"};

    // C_i = [(i-1)*PRB/10, i*PRB/10); prb == 50 clamps into C10.
    static int category(int prb) {
        if (prb < 0 || prb > kPrbTotal) throw std::invalid_argument("PRB out of range [0,50]");
        return prb == kPrbTotal ? kCategories : prb * kCategories / kPrbTotal + 1;
    }
};

struct SchemaA2 {
    static constexpr int kUsers = 7;
    std::vector<int> group_sizes{3, 2, 2};
    std::vector<std::string> kpis{"MSE", "DTU", "G"};

    int group_count() const { return static_cast<int>(group_sizes.size()); }

    // Users are assigned to groups contiguously: g0 = {0,1,2}, g1 = {3,4}, ...
    std::vector<int> users_of(int group) const {
        int begin = 0;
        for (int g = 0; g < group; ++g) begin += group_sizes[g];
        std::vector<int> users;
        for (int u = 0; u < group_sizes[group]; ++u) users.push_back(begin + u);
        return users;
    }

    int group_of(int user) const {
        int begin = 0;
        for (int g = 0; g < group_count(); ++g) {
            if (user < begin + group_sizes[g]) return g;
            begin += group_sizes[g];
        }
        throw std::invalid_argument("user out of range");
    }
};

using Schema = std::variant<SchemaA1, SchemaA2>;

// Nearest point of {0,25,50,75,100} to 100*count/size, ties rounding up.
int percentage_of(int count, int size);

// ---------------------------------------------------------------------------
// Raw trace model

struct A1Action {
    std::array<int, 3> prb{};
    std::array<std::string, 3> policy{};
};

struct A2Action {
    std::vector<int> mask;  // length N, each 0|1

    int scheduled_in(const SchemaA2& schema, int group) const {
        int n = 0;
        for (int u : schema.users_of(group)) n += mask[static_cast<size_t>(u)];
        return n;
    }
};

using Action = std::variant<A1Action, A2Action>;

struct Step {
    long long t = 0;
    // KPI name -> matrix. A1: [slice][measurement]; A2: one row of N values.
    std::map<std::string, std::vector<std::vector<double>>> state;
    Action action;
    double reward = 0.0;
    // Optional labels carried through to analytics (e.g. channel="NLOS").
    std::map<std::string, std::string> meta;
};

struct Trajectory {
    std::vector<Step> steps;
    size_t size() const { return steps.size(); }
};

struct ValidationError : std::runtime_error {
    size_t index;
    ValidationError(size_t i, const std::string& what)
        : std::runtime_error("step " + std::to_string(i) + ": " + what), index(i) {}
};

Trajectory validate_trajectory(std::vector<Step> steps, const Schema& schema);

// ---------------------------------------------------------------------------
// Symbolic terms

enum class Predicate { Inc, Dec, Const, ToWF, ToRR, ToPF, Sched, NoSched };

enum class Quartile { Q1 = 1, Q2, Q3, Q4, MAX };

inline int ordinal(Quartile q) { return static_cast<int>(q); }

const char* to_string(Predicate p);
const char* to_string(Quartile q);

struct SymbolicTerm {
    Predicate pred;
    std::string subject;                  // "tx_brate@embb", "PRB@embb", "sched@embb", "g1"
    std::optional<Quartile> quartile;
    std::optional<int> cat_start;         // 1..10; const carries only cat_start
    std::optional<int> cat_final;
    std::optional<int> percentage;        // 0,25,50,75,100

    bool operator==(const SymbolicTerm&) const = default;
};

std::string render_term(const SymbolicTerm& term);
SymbolicTerm parse_term(const std::string& text);

struct TermSet;
TermSet parse_term_set(const std::string& key);  // inverse of TermSet::key()

// Ordered set of terms, one per subject, sorted by subject.
struct TermSet {
    std::vector<SymbolicTerm> terms;

    TermSet() = default;
    explicit TermSet(std::vector<SymbolicTerm> ts);  // normalizes

    std::string key() const;  // canonical rendering, ';'-joined
    const SymbolicTerm* find(const std::string& subject) const;

    bool operator==(const TermSet&) const = default;
};

using SymbolicState = TermSet;
using SymbolicAction = TermSet;

struct Effect {
    long long t = 0;  // timestep of the causing action
    TermSet terms;
};

struct SymbolicStep {
    long long t = 0;
    SymbolicState state;
    SymbolicAction action;
    std::optional<TermSet> effect;  // absent on the last step
    std::map<std::string, std::string> meta;
};

}  // namespace symbxrl
