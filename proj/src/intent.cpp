#include "symbxrl/intent.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace symbxrl {

std::vector<IntentAtom> Intent::atoms() const {
    std::vector<IntentAtom> out;
    for (const auto& clause : clauses)
        for (int u : clause.users) out.push_back({clause.schedule, u});
    return out;
}

namespace {

class Parser {
public:
    Parser(const std::string& text, const SchemaA2& schema) : text_(text), schema_(schema) {}

    Intent parse() {
        Intent intent;
        intent.clauses.push_back(clause());
        skip_ws();
        while (peek() == '&') {
            ++pos_;
            intent.clauses.push_back(clause());
            skip_ws();
        }
        if (peek() == '@') {
            ++pos_;
            intent.window = window();
            skip_ws();
        }
        if (pos_ != text_.size()) fail("trailing input");
        return intent;
    }

private:
    [[noreturn]] void fail(const std::string& what) { throw IntentParseError(text_, pos_, what); }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    std::string ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        if (pos_ == start) fail("expected identifier");
        return text_.substr(start, pos_ - start);
    }

    long long nat() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected number");
        return std::stoll(text_.substr(start, pos_ - start));
    }

    IntentClause clause() {
        skip_ws();
        size_t mark = pos_;
        std::string word = ident();
        if (word == "forall") {
            IntentClause c;
            c.var = ident();
            if (ident() != "in") fail("expected 'in'");
            c.users = user_set(c.set_name);
            expect(':');
            auto [sched, arg] = atom();
            if (arg != *c.var) fail("quantified atom must use variable '" + *c.var + "'");
            c.schedule = sched;
            return c;
        }
        pos_ = mark;
        auto [sched, arg] = atom();
        IntentClause c;
        c.schedule = sched;
        c.users.push_back(check_user(arg));
        return c;
    }

    std::pair<bool, std::string> atom() {
        std::string pred = ident();
        bool sched;
        if (pred == "schedule")
            sched = true;
        else if (pred == "notSchedule")
            sched = false;
        else
            fail("unknown predicate '" + pred + "'");
        expect('(');
        std::string arg = ident();
        expect(')');
        return {sched, arg};
    }

    int check_user(const std::string& arg) {
        for (char c : arg)
            if (!std::isdigit(static_cast<unsigned char>(c))) fail("expected user index, got '" + arg + "'");
        int u = std::stoi(arg);
        if (u < 0 || u >= SchemaA2::kUsers) fail("unknown user " + arg);
        return u;
    }

    std::vector<int> user_set(std::optional<std::string>& name) {
        skip_ws();
        if (peek() == 'G') {
            ++pos_;
            int g = static_cast<int>(nat());
            if (g < 0 || g >= schema_.group_count()) fail("unknown group G" + std::to_string(g));
            name = "G" + std::to_string(g);
            return schema_.users_of(g);
        }
        if (peek() == '{') {
            ++pos_;
            std::vector<int> users;
            users.push_back(check_user(std::to_string(nat())));
            while (peek() == ',') {
                ++pos_;
                users.push_back(check_user(std::to_string(nat())));
            }
            expect('}');
            std::string rendered = "{";
            for (size_t i = 0; i < users.size(); ++i)
                rendered += (i ? "," : "") + std::to_string(users[i]);
            name = rendered + "}";
            return users;
        }
        fail("expected 'G<n>' or '{...}'");
    }

    std::pair<long long, long long> window() {
        expect('[');
        long long a = nat();
        expect(',');
        long long b = nat();
        expect(']');
        if (a > b) fail("window start exceeds end");
        return {a, b};
    }

    const std::string& text_;
    const SchemaA2& schema_;
    size_t pos_ = 0;
};

}  // namespace

Intent parse_intent(const std::string& text, const SchemaA2& schema) {
    Intent intent = Parser(text, schema).parse();
    intent.name = render_intent(intent);
    return intent;
}

std::string render_intent(const Intent& intent) {
    std::string out;
    for (size_t i = 0; i < intent.clauses.size(); ++i) {
        const auto& c = intent.clauses[i];
        if (i) out += " & ";
        const char* pred = c.schedule ? "schedule" : "notSchedule";
        if (c.var) {
            out += "forall " + *c.var + " in " + *c.set_name + ": " + pred + "(" + *c.var + ")";
        } else {
            out += std::string(pred) + "(" + std::to_string(c.users.front()) + ")";
        }
    }
    if (intent.window)
        out += " @ [" + std::to_string(intent.window->first) + "," +
               std::to_string(intent.window->second) + "]";
    return out;
}

bool satisfies(const A2Action& action, const Intent& intent, long long t) {
    if (!intent.active_at(t)) return true;
    for (const auto& atom : intent.atoms()) {
        bool scheduled = action.mask[static_cast<size_t>(atom.user)] == 1;
        if (atom.schedule != scheduled) return false;
    }
    return true;
}

bool satisfies_all(const A2Action& action, const std::vector<Intent>& intents, long long t) {
    return std::all_of(intents.begin(), intents.end(),
                       [&](const Intent& i) { return satisfies(action, i, t); });
}

std::vector<Intent> parse_intent_file(const std::string& path, const SchemaA2& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open intent file '" + path + "'");
    std::vector<Intent> intents;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        intents.push_back(parse_intent(line, schema));
    }
    return intents;
}

void validate_intents(const std::vector<Intent>& intents) {
    for (size_t i = 0; i < intents.size(); ++i) {
        for (size_t j = i; j < intents.size(); ++j) {
            // conservative overlap test: unwindowed intents overlap everything
            const auto &wi = intents[i].window, &wj = intents[j].window;
            bool overlap = !wi || !wj || (wi->first <= wj->second && wj->first <= wi->second);
            if (!overlap) continue;
            for (const auto& a : intents[i].atoms())
                for (const auto& b : intents[j].atoms())
                    if (a.user == b.user && a.schedule != b.schedule)
                        throw std::invalid_argument(
                            "unsatisfiable intents: schedule and notSchedule on user " +
                            std::to_string(a.user));
        }
    }
}

}  // namespace symbxrl
