#pragma once

#include <optional>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"

namespace symbxrl {

// One scheduling atom, already expanded against the schema: schedule(u) or
// notSchedule(u) for a concrete user index.
struct IntentAtom {
    bool schedule = false;  // false = notSchedule
    int user = 0;

    bool operator==(const IntentAtom&) const = default;
};

// A clause is either a plain atom or a universally quantified atom over a
// user set; evaluation expands the quantifier over the set's members.
struct IntentClause {
    bool schedule = false;
    std::vector<int> users;           // quantified set, or a single user
    std::optional<std::string> set_name;  // "G1" or "{1,2}" as written, for render
    std::optional<std::string> var;       // quantifier variable name, if any

    bool operator==(const IntentClause&) const = default;
};

struct Intent {
    std::vector<IntentClause> clauses;  // conjunction
    std::optional<std::pair<long long, long long>> window;  // inclusive
    std::string name;

    bool active_at(long long t) const {
        return !window || (t >= window->first && t <= window->second);
    }

    std::vector<IntentAtom> atoms() const;
};

struct IntentParseError : std::runtime_error {
    size_t position;
    IntentParseError(const std::string& text, size_t pos, const std::string& what)
        : std::runtime_error("intent '" + text + "' at " + std::to_string(pos) + ": " + what),
          position(pos) {}
};

Intent parse_intent(const std::string& text, const SchemaA2& schema);
std::string render_intent(const Intent& intent);

bool satisfies(const A2Action& action, const Intent& intent, long long t);
bool satisfies_all(const A2Action& action, const std::vector<Intent>& intents, long long t);

// Intent file: one intent per line, '#' comments and blank lines ignored.
std::vector<Intent> parse_intent_file(const std::string& path, const SchemaA2& schema);

// Rejects intents whose conjunction no action can satisfy (schedule and
// notSchedule atoms on the same user, possibly across intents with
// overlapping windows).
void validate_intents(const std::vector<Intent>& intents);

}  // namespace symbxrl
