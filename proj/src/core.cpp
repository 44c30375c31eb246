#include "symbxrl/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace symbxrl {

int percentage_of(int count, int size) {
    if (size <= 0) throw std::invalid_argument("group size must be positive");
    if (count < 0 || count > size) throw std::invalid_argument("count out of range");
    // round_half_up(100*count / (25*size)) in exact integer arithmetic
    int idx = (200 * count + 25 * size) / (50 * size);
    return 25 * idx;
}

namespace {

void validate_a1_step(const Step& step, const SchemaA1& schema, size_t i) {
    for (const auto& kpi : schema.kpis) {
        auto it = step.state.find(kpi);
        if (it == step.state.end()) throw ValidationError(i, "missing KPI '" + kpi + "'");
        if (it->second.size() != schema.slices.size())
            throw ValidationError(i, "KPI '" + kpi + "' slice count != " +
                                         std::to_string(schema.slices.size()));
        for (const auto& row : it->second) {
            if (row.size() != SchemaA1::kMeasurements)
                throw ValidationError(i, "KPI '" + kpi + "' measurement count != " +
                                             std::to_string(SchemaA1::kMeasurements));
            for (double v : row)
                if (!std::isfinite(v)) throw ValidationError(i, "non-finite value in '" + kpi + "'");
        }
    }
    const auto* action = std::get_if<A1Action>(&step.action);
    if (!action) throw ValidationError(i, "action is not an A1 action");
    for (int prb : action->prb)
        if (prb < 1 || prb > SchemaA1::kPrbTotal) throw ValidationError(i, "PRB out of range [1,50]");
    for (const auto& pol : action->policy)
        if (std::find(schema.policies.begin(), schema.policies.end(), pol) == schema.policies.end())
            throw ValidationError(i, "unknown policy '" + pol + "'");
}

void validate_a2_step(const Step& step, const SchemaA2& schema, size_t i) {
    for (const auto& kpi : schema.kpis) {
        auto it = step.state.find(kpi);
        if (it == step.state.end()) throw ValidationError(i, "missing KPI '" + kpi + "'");
        if (it->second.size() != 1 || it->second[0].size() != SchemaA2::kUsers)
            throw ValidationError(i, "KPI '" + kpi + "' dimension mismatch, want 1x" +
                                         std::to_string(SchemaA2::kUsers));
        for (double v : it->second[0])
            if (!std::isfinite(v)) throw ValidationError(i, "non-finite value in '" + kpi + "'");
    }
    const auto* action = std::get_if<A2Action>(&step.action);
    if (!action) throw ValidationError(i, "action is not an A2 action");
    if (action->mask.size() != SchemaA2::kUsers)
        throw ValidationError(i, "mask length != " + std::to_string(SchemaA2::kUsers));
    for (int b : action->mask)
        if (b != 0 && b != 1) throw ValidationError(i, "mask entries must be 0|1");
}

}  // namespace

Trajectory validate_trajectory(std::vector<Step> steps, const Schema& schema) {
    if (steps.empty()) throw ValidationError(0, "empty trajectory");
    long long prev_t = -1;
    for (size_t i = 0; i < steps.size(); ++i) {
        const Step& step = steps[i];
        if (step.t < 0) throw ValidationError(i, "negative timestep");
        if (step.t <= prev_t) throw ValidationError(i, "non-monotone timestep");
        prev_t = step.t;
        if (!std::isfinite(step.reward)) throw ValidationError(i, "non-finite reward");
        std::visit([&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SchemaA1>)
                validate_a1_step(step, s, i);
            else
                validate_a2_step(step, s, i);
        }, schema);
    }
    return Trajectory{std::move(steps)};
}

// ---------------------------------------------------------------------------
// Terms

const char* to_string(Predicate p) {
    switch (p) {
        case Predicate::Inc: return "inc";
        case Predicate::Dec: return "dec";
        case Predicate::Const: return "const";
        case Predicate::ToWF: return "toWF";
        case Predicate::ToRR: return "toRR";
        case Predicate::ToPF: return "toPF";
        case Predicate::Sched: return "sched";
        case Predicate::NoSched: return "noSched";
    }
    return "?";
}

const char* to_string(Quartile q) {
    switch (q) {
        case Quartile::Q1: return "Q1";
        case Quartile::Q2: return "Q2";
        case Quartile::Q3: return "Q3";
        case Quartile::Q4: return "Q4";
        case Quartile::MAX: return "MAX";
    }
    return "?";
}

std::string render_term(const SymbolicTerm& term) {
    std::string out = to_string(term.pred);
    out += '(';
    out += term.subject;
    if (term.quartile) { out += ','; out += to_string(*term.quartile); }
    if (term.cat_start) out += ",C" + std::to_string(*term.cat_start);
    if (term.cat_final) out += ",C" + std::to_string(*term.cat_final);
    if (term.percentage) out += ',' + std::to_string(*term.percentage);
    out += ')';
    return out;
}

namespace {

struct ParseError : std::runtime_error {
    ParseError(const std::string& text, size_t pos, const std::string& what)
        : std::runtime_error("term '" + text + "' at " + std::to_string(pos) + ": " + what) {}
};

std::optional<Predicate> predicate_from(const std::string& name) {
    static const std::map<std::string, Predicate> table = {
        {"inc", Predicate::Inc},   {"dec", Predicate::Dec},     {"const", Predicate::Const},
        {"toWF", Predicate::ToWF}, {"toRR", Predicate::ToRR},   {"toPF", Predicate::ToPF},
        {"sched", Predicate::Sched}, {"noSched", Predicate::NoSched}};
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::optional<Quartile> quartile_from(const std::string& s) {
    if (s == "Q1") return Quartile::Q1;
    if (s == "Q2") return Quartile::Q2;
    if (s == "Q3") return Quartile::Q3;
    if (s == "Q4") return Quartile::Q4;
    if (s == "MAX") return Quartile::MAX;
    return std::nullopt;
}

std::optional<int> category_from(const std::string& s) {
    if (s.size() < 2 || s[0] != 'C') return std::nullopt;
    int n = 0;
    for (size_t i = 1; i < s.size(); ++i) {
        if (!isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        n = n * 10 + (s[i] - '0');
    }
    if (n < 1 || n > SchemaA1::kCategories) return std::nullopt;
    return n;
}

std::optional<int> percentage_from(const std::string& s) {
    for (int p : {0, 25, 50, 75, 100})
        if (s == std::to_string(p)) return p;
    return std::nullopt;
}

}  // namespace

SymbolicTerm parse_term(const std::string& text) {
    size_t open = text.find('(');
    if (open == std::string::npos) throw ParseError(text, text.size(), "expected '('");
    if (text.empty() || text.back() != ')')
        throw ParseError(text, text.size(), "expected trailing ')'");

    auto pred = predicate_from(text.substr(0, open));
    if (!pred) throw ParseError(text, 0, "unknown predicate '" + text.substr(0, open) + "'");

    std::vector<std::string> parts;
    std::string body = text.substr(open + 1, text.size() - open - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.empty() || parts[0].empty()) throw ParseError(text, open + 1, "missing subject");

    SymbolicTerm term;
    term.pred = *pred;
    term.subject = parts[0];
    std::vector<std::string> args(parts.begin() + 1, parts.end());

    auto need = [&](bool ok, const char* what) {
        if (!ok) throw ParseError(text, open, std::string("illegal arguments for predicate: ") + what);
    };

    switch (*pred) {
        case Predicate::Inc:
        case Predicate::Dec:
            if (args.size() == 1 && quartile_from(args[0])) {
                term.quartile = quartile_from(args[0]);
            } else if (args.size() == 2 && category_from(args[0]) && category_from(args[1])) {
                term.cat_start = category_from(args[0]);
                term.cat_final = category_from(args[1]);
            } else {
                need(false, "want (quartile) or (Cstart,Cfinal)");
            }
            break;
        case Predicate::Const:
            if (args.size() == 1 && quartile_from(args[0])) {
                term.quartile = quartile_from(args[0]);
            } else if (args.size() == 1 && category_from(args[0])) {
                term.cat_start = category_from(args[0]);
            } else {
                need(false, "want (quartile) or (category)");
            }
            break;
        case Predicate::ToWF:
        case Predicate::ToRR:
        case Predicate::ToPF:
        case Predicate::NoSched:
            need(args.empty(), "want no arguments");
            break;
        case Predicate::Sched:
            need(args.size() == 2 && quartile_from(args[0]) && percentage_from(args[1]),
                 "want (quartile,percentage)");
            term.quartile = quartile_from(args[0]);
            term.percentage = percentage_from(args[1]);
            break;
    }
    return term;
}

TermSet::TermSet(std::vector<SymbolicTerm> ts) : terms(std::move(ts)) {
    std::sort(terms.begin(), terms.end(),
              [](const SymbolicTerm& a, const SymbolicTerm& b) { return a.subject < b.subject; });
    for (size_t i = 1; i < terms.size(); ++i)
        if (terms[i].subject == terms[i - 1].subject)
            throw std::invalid_argument("duplicate subject '" + terms[i].subject + "' in term set");
}

std::string TermSet::key() const {
    std::string out;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i) out += ';';
        out += render_term(terms[i]);
    }
    return out;
}

TermSet parse_term_set(const std::string& key) {
    std::vector<SymbolicTerm> terms;
    std::stringstream ss(key);
    std::string item;
    while (std::getline(ss, item, ';'))
        if (!item.empty()) terms.push_back(parse_term(item));
    return TermSet(std::move(terms));
}

const SymbolicTerm* TermSet::find(const std::string& subject) const {
    for (const auto& t : terms)
        if (t.subject == subject) return &t;
    return nullptr;
}

}  // namespace symbxrl
