// SPDX-License-Identifier: Apache-2.0
#include "apc/formula.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace apc {

CmpOp negate(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Gt: return CmpOp::Le;
    case CmpOp::Ge: return CmpOp::Lt;
    }
    return op;
}

const char* to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    }
    return "?";
}

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_counter(const Counter& c) {
    return (static_cast<std::size_t>(c.kind) << 48) ^ (static_cast<std::size_t>(c.id) << 16) ^ c.instance;
}

bool cmp_holds(CmpOp op, Int lhs_minus_rhs) {
    switch (op) {
    case CmpOp::Eq: return lhs_minus_rhs == 0;
    case CmpOp::Ne: return lhs_minus_rhs != 0;
    case CmpOp::Lt: return lhs_minus_rhs < 0;
    case CmpOp::Le: return lhs_minus_rhs <= 0;
    case CmpOp::Gt: return lhs_minus_rhs > 0;
    case CmpOp::Ge: return lhs_minus_rhs >= 0;
    }
    return false;
}

}  // namespace

Formula make_formula(FormulaNode n) {
    std::size_t h = static_cast<std::size_t>(n.kind) * 31 + static_cast<std::size_t>(n.op);
    if (n.kind == FormulaKind::Cmp) {
        h = mix(h, n.lhs.node()->hash);
        h = mix(h, n.rhs.node()->hash);
    }
    for (const auto& c : n.children) {
        h = mix(h, c.node()->hash);
    }
    for (const auto& b : n.bound) {
        h = mix(h, hash_counter(b.var));
        h = mix(h, b.lower.node()->hash);
        h = mix(h, b.upper ? b.upper->node()->hash : 17);
        h = mix(h, b.upper_inclusive ? 1 : 2);
    }
    n.hash = h;
    return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

Formula::Formula() : Formula(truth(true)) {}

Formula Formula::truth(bool value) {
    static const Formula t = [] {
        FormulaNode n;
        n.kind = FormulaKind::True;
        return make_formula(std::move(n));
    }();
    static const Formula f = [] {
        FormulaNode n;
        n.kind = FormulaKind::False;
        return make_formula(std::move(n));
    }();
    return value ? t : f;
}

Formula Formula::cmp(CmpOp op, Expr lhs, Expr rhs) {
    if (!contains_star(lhs) && !contains_star(rhs)) {
        try {
            const Polynomial diff = Polynomial::of(lhs - rhs);
            if (diff.is_constant()) {
                return truth(cmp_holds(op, diff.constant));
            }
        } catch (const ArithmeticOverflow&) {
            // keep the comparison unfolded
        }
    }
    FormulaNode n;
    n.kind = FormulaKind::Cmp;
    n.op = op;
    n.lhs = std::move(lhs);
    n.rhs = std::move(rhs);
    return make_formula(std::move(n));
}

Formula Formula::negation(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: return truth(false);
    case FormulaKind::False: return truth(true);
    case FormulaKind::Cmp: return cmp(negate(f.op()), f.lhs(), f.rhs());
    case FormulaKind::Not: return f.children().front();
    default: break;
    }
    FormulaNode n;
    n.kind = FormulaKind::Not;
    n.children = {f};
    return make_formula(std::move(n));
}

namespace {

Formula junction(FormulaKind kind, std::vector<Formula> parts) {
    const bool is_and = kind == FormulaKind::And;
    std::vector<Formula> flat;
    std::unordered_multimap<std::size_t, std::size_t> seen;
    std::function<bool(const Formula&)> add = [&](const Formula& p) {
        if (p.kind() == kind) {
            for (const auto& c : p.children()) {
                if (!add(c)) {
                    return false;
                }
            }
            return true;
        }
        if (p.kind() == (is_and ? FormulaKind::True : FormulaKind::False)) {
            return true;
        }
        if (p.kind() == (is_and ? FormulaKind::False : FormulaKind::True)) {
            return false;
        }
        auto [lo, hi] = seen.equal_range(p.node()->hash);
        for (auto it = lo; it != hi; ++it) {
            if (flat[it->second] == p) {
                return true;
            }
        }
        seen.emplace(p.node()->hash, flat.size());
        flat.push_back(p);
        return true;
    };
    for (const auto& p : parts) {
        if (!add(p)) {
            return Formula::truth(!is_and);
        }
    }
    if (flat.empty()) {
        return Formula::truth(is_and);
    }
    if (flat.size() == 1) {
        return flat.front();
    }
    FormulaNode n;
    n.kind = kind;
    n.children = std::move(flat);
    return make_formula(std::move(n));
}

Formula range_nonempty(const BoundVar& b) {
    if (!b.upper) {
        return Formula::truth(true);
    }
    return Formula::cmp(b.upper_inclusive ? CmpOp::Le : CmpOp::Lt, b.lower, *b.upper);
}

}  // namespace

Formula Formula::conj(std::vector<Formula> parts) { return junction(FormulaKind::And, std::move(parts)); }
Formula Formula::disj(std::vector<Formula> parts) { return junction(FormulaKind::Or, std::move(parts)); }

Formula Formula::implies(const Formula& lhs, const Formula& rhs) {
    if (lhs.is_false() || rhs.is_true()) {
        return truth(true);
    }
    if (lhs.is_true()) {
        return rhs;
    }
    if (rhs.is_false()) {
        return negation(lhs);
    }
    if (lhs == rhs) {
        return truth(true);
    }
    FormulaNode n;
    n.kind = FormulaKind::Implies;
    n.children = {lhs, rhs};
    return make_formula(std::move(n));
}

Formula Formula::forall(std::vector<BoundVar> vars, const Formula& body) {
    if (vars.empty() || body.is_true()) {
        return body;
    }
    if (body.is_false()) {
        std::vector<Formula> empty_ranges;
        for (const auto& b : vars) {
            empty_ranges.push_back(negation(range_nonempty(b)));
        }
        return disj(std::move(empty_ranges));
    }
    FormulaNode n;
    n.kind = FormulaKind::Forall;
    n.children = {body};
    n.bound = std::move(vars);
    return make_formula(std::move(n));
}

Formula Formula::exists(std::vector<BoundVar> vars, const Formula& body) {
    if (vars.empty() || body.is_false()) {
        return body;
    }
    if (body.is_true()) {
        std::vector<Formula> nonempty;
        for (const auto& b : vars) {
            nonempty.push_back(range_nonempty(b));
        }
        return conj(std::move(nonempty));
    }
    FormulaNode n;
    n.kind = FormulaKind::Exists;
    n.children = {body};
    n.bound = std::move(vars);
    return make_formula(std::move(n));
}

FormulaKind Formula::kind() const { return node_->kind; }
CmpOp Formula::op() const { return node_->op; }
const Expr& Formula::lhs() const { return node_->lhs; }
const Expr& Formula::rhs() const { return node_->rhs; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
const std::vector<BoundVar>& Formula::bound() const { return node_->bound; }

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) {
        return true;
    }
    const auto& x = *a.node_;
    const auto& y = *b.node_;
    if (x.hash != y.hash || x.kind != y.kind || x.op != y.op) {
        return false;
    }
    if (x.kind == FormulaKind::Cmp && !(x.lhs == y.lhs && x.rhs == y.rhs)) {
        return false;
    }
    return x.children == y.children && x.bound == y.bound;
}

// ---------------------------------------------------------------------------
// Traversals

bool contains_star(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::Cmp: return contains_star(f.lhs()) || contains_star(f.rhs());
    default: break;
    }
    for (const auto& b : f.bound()) {
        if (contains_star(b.lower) || (b.upper && contains_star(*b.upper))) {
            return true;
        }
    }
    return std::any_of(f.children().begin(), f.children().end(),
                       [](const Formula& c) { return contains_star(c); });
}

bool has_quantifiers(const Formula& f) {
    if (f.is_quantifier()) {
        return true;
    }
    return std::any_of(f.children().begin(), f.children().end(),
                       [](const Formula& c) { return has_quantifiers(c); });
}

namespace {

void collect_free(const Formula& f, std::set<Counter>& out) {
    switch (f.kind()) {
    case FormulaKind::Cmp:
        collect_counters(f.lhs(), out);
        collect_counters(f.rhs(), out);
        return;
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        std::set<Counter> inner;
        collect_free(f.body(), inner);
        for (const auto& b : f.bound()) {
            inner.erase(b.var);
        }
        for (const auto& b : f.bound()) {
            collect_counters(b.lower, inner);
            if (b.upper) {
                collect_counters(*b.upper, inner);
            }
        }
        out.insert(inner.begin(), inner.end());
        return;
    }
    default:
        for (const auto& c : f.children()) {
            collect_free(c, out);
        }
    }
}

void collect_all(const Formula& f, std::set<Counter>& out) {
    if (f.kind() == FormulaKind::Cmp) {
        collect_counters(f.lhs(), out);
        collect_counters(f.rhs(), out);
    }
    for (const auto& b : f.bound()) {
        out.insert(b.var);
        collect_counters(b.lower, out);
        if (b.upper) {
            collect_counters(*b.upper, out);
        }
    }
    for (const auto& c : f.children()) {
        collect_all(c, out);
    }
}

template <typename Fn>
void for_each_expr(const Formula& f, Fn&& fn) {
    if (f.kind() == FormulaKind::Cmp) {
        fn(f.lhs());
        fn(f.rhs());
    }
    for (const auto& b : f.bound()) {
        fn(b.lower);
        if (b.upper) {
            fn(*b.upper);
        }
    }
    for (const auto& c : f.children()) {
        for_each_expr(c, fn);
    }
}

}  // namespace

std::set<Counter> free_counters(const Formula& f) {
    std::set<Counter> out;
    collect_free(f, out);
    return out;
}

std::set<Counter> all_counters(const Formula& f) {
    std::set<Counter> out;
    collect_all(f, out);
    return out;
}

bool mentions_counter(const Formula& f, const Counter& c) { return free_counters(f).contains(c); }

std::set<std::string> symbols_of(const Formula& f) {
    std::set<std::string> out;
    for_each_expr(f, [&](const Expr& e) { collect_symbols(e, out); });
    return out;
}

std::map<std::string, std::size_t> functions_of(const Formula& f) {
    std::map<std::string, std::size_t> out;
    for_each_expr(f, [&](const Expr& e) { collect_functions(e, out); });
    return out;
}

bool is_nonlinear(const Formula& f) {
    bool nonlinear = false;
    for_each_expr(f, [&](const Expr& e) { nonlinear = nonlinear || is_nonlinear(e); });
    return nonlinear;
}

std::size_t formula_size(const Formula& f) {
    std::size_t n = 1;
    if (f.kind() == FormulaKind::Cmp) {
        n += expr_size(f.lhs()) + expr_size(f.rhs());
    }
    for (const auto& b : f.bound()) {
        n += 1 + expr_size(b.lower) + (b.upper ? expr_size(*b.upper) : 0);
    }
    for (const auto& c : f.children()) {
        n += formula_size(c);
    }
    return n;
}

std::vector<Formula> conjuncts(const Formula& f) {
    if (f.kind() == FormulaKind::And) {
        return f.children();
    }
    if (f.is_true()) {
        return {};
    }
    return {f};
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

struct Substituter {
    std::uint32_t next_fresh = 1;

    Formula run(const Formula& f, const Substitution& s) {
        if (s.empty()) {
            return f;
        }
        switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False: return f;
        case FormulaKind::Cmp: return Formula::cmp(f.op(), substitute(f.lhs(), s), substitute(f.rhs(), s));
        case FormulaKind::Not: return Formula::negation(run(f.children()[0], s));
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> parts;
            parts.reserve(f.children().size());
            for (const auto& c : f.children()) {
                parts.push_back(run(c, s));
            }
            return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
        }
        case FormulaKind::Implies: return Formula::implies(run(f.children()[0], s), run(f.children()[1], s));
        case FormulaKind::Forall:
        case FormulaKind::Exists: return quantifier(f, s);
        }
        return f;
    }

    Formula quantifier(const Formula& f, const Substitution& s) {
        Substitution inner = s;
        for (const auto& b : f.bound()) {
            inner.erase(SubstKey::of(b.var));
        }
        // Only replacements that reach a free occurrence inside the body matter.
        const std::set<Counter> body_free = free_counters(f.body());
        std::set<Counter> incoming;
        for (auto it = inner.begin(); it != inner.end();) {
            const bool relevant = it->first.kind == SubstKey::Kind::Symbol || body_free.contains(it->first.counter);
            if (!relevant) {
                it = inner.erase(it);
                continue;
            }
            collect_counters(it->second, incoming);
            ++it;
        }
        std::vector<BoundVar> vars;
        for (const auto& b : f.bound()) {
            BoundVar nb = b;
            nb.lower = substitute(b.lower, s);
            if (b.upper) {
                nb.upper = substitute(*b.upper, s);
            }
            if (!inner.empty() && incoming.contains(b.var)) {
                Counter fresh = b.var;
                fresh.id = next_fresh++;
                fresh.instance = 0;
                inner[SubstKey::of(b.var)] = Expr::counter(fresh);
                nb.var = fresh;
            }
            vars.push_back(std::move(nb));
        }
        Formula body = run(f.body(), inner);
        return f.kind() == FormulaKind::Forall ? Formula::forall(std::move(vars), body)
                                               : Formula::exists(std::move(vars), body);
    }
};

}  // namespace

Formula substitute(const Formula& f, const Substitution& s) {
    if (s.empty()) {
        return f;
    }
    std::set<Counter> used = all_counters(f);
    for (const auto& [k, e] : s) {
        if (k.kind == SubstKey::Kind::Counter) {
            used.insert(k.counter);
        }
        collect_counters(e, used);
    }
    Substituter sub;
    for (const auto& c : used) {
        sub.next_fresh = std::max(sub.next_fresh, c.id + 1);
    }
    return sub.run(f, s);
}

// ---------------------------------------------------------------------------
// Weakening and simplification

namespace {

Formula weaken(const Formula& f, bool positive) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Cmp: return contains_star(f) ? Formula::truth(positive) : f;
    case FormulaKind::Not: return Formula::negation(weaken(f.children()[0], !positive));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
            parts.push_back(weaken(c, positive));
        }
        return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Implies:
        return Formula::implies(weaken(f.children()[0], !positive), weaken(f.children()[1], positive));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        Formula body = weaken(f.body(), positive);
        return f.kind() == FormulaKind::Forall ? Formula::forall(f.bound(), body) : Formula::exists(f.bound(), body);
    }
    }
    return f;
}

// Decides `0 <= p` (returns true) or `0 > p` (returns false) when p is a
// constant plus a combination of counters known to be nonnegative.
std::optional<bool> sign_of(const Polynomial& p, const std::set<Counter>& nonneg) {
    bool all_pos = true;
    bool all_neg = true;
    for (const auto& [m, c] : p.terms) {
        if (m.size() != 1 || m.front().kind() != ExprKind::Counter || !nonneg.contains(m.front().counter_value())) {
            return std::nullopt;
        }
        all_pos = all_pos && c > 0;
        all_neg = all_neg && c < 0;
    }
    if (all_pos && p.constant >= 0) {
        return true;
    }
    if (all_neg && p.constant < 0) {
        return false;
    }
    return std::nullopt;
}

Formula fold_cmp(const Formula& f, const std::set<Counter>& nonneg) {
    if (contains_star(f)) {
        return f;
    }
    try {
        // Rewrite as 0 <= p or 0 < p.
        Expr p;
        bool strict = false;
        switch (f.op()) {
        case CmpOp::Le: p = f.rhs() - f.lhs(); break;
        case CmpOp::Lt: p = f.rhs() - f.lhs(); strict = true; break;
        case CmpOp::Ge: p = f.lhs() - f.rhs(); break;
        case CmpOp::Gt: p = f.lhs() - f.rhs(); strict = true; break;
        default: return f;
        }
        if (strict) {
            p = p - Expr::integer(1);
        }
        if (auto sign = sign_of(Polynomial::of(p), nonneg)) {
            return Formula::truth(*sign);
        }
    } catch (const ArithmeticOverflow&) {
    }
    return f;
}

Formula simplify_ctx(const Formula& f, const std::set<Counter>& nonneg) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Cmp: return fold_cmp(f, nonneg);
    case FormulaKind::Not: return Formula::negation(simplify_ctx(f.children()[0], nonneg));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
            parts.push_back(simplify_ctx(c, nonneg));
        }
        return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Implies:
        return Formula::implies(simplify_ctx(f.children()[0], nonneg), simplify_ctx(f.children()[1], nonneg));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        std::set<Counter> inner = nonneg;
        for (const auto& b : f.bound()) {
            inner.erase(b.var);
        }
        for (const auto& b : f.bound()) {
            const Polynomial lo = Polynomial::of(b.lower);
            if (lo.is_constant() && lo.constant >= 0) {
                inner.insert(b.var);
            } else if (auto s = sign_of(lo, nonneg); s && *s) {
                inner.insert(b.var);
            }
        }
        Formula body = simplify_ctx(f.body(), inner);
        Formula rebuilt = f.kind() == FormulaKind::Forall ? Formula::forall(f.bound(), body)
                                                          : Formula::exists(f.bound(), body);
        if (!rebuilt.is_quantifier()) {
            // The quantifier collapsed into range conditions over outer counters.
            return simplify_ctx(rebuilt, nonneg);
        }
        return rebuilt;
    }
    }
    return f;
}

}  // namespace

Formula drop_star_predicates(const Formula& f) { return weaken(f, true); }

Formula simplify_with_counter_bounds(const Formula& f, const std::set<Counter>& nonneg) {
    return simplify_ctx(f, nonneg);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(std::ostream& os, const Formula& f);

void print_child(std::ostream& os, const Formula& f) {
    const bool wrap = f.kind() == FormulaKind::And || f.kind() == FormulaKind::Or ||
                      f.kind() == FormulaKind::Implies || f.is_quantifier();
    if (wrap) {
        os << '(';
    }
    print(os, f);
    if (wrap) {
        os << ')';
    }
}

void print_bound(std::ostream& os, const BoundVar& b) {
    os << b.var.display() << " in [" << b.lower.to_string() << ", ";
    if (b.upper) {
        os << b.upper->to_string() << (b.upper_inclusive ? "]" : ")");
    } else {
        os << "inf)";
    }
}

void print(std::ostream& os, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: os << "true"; break;
    case FormulaKind::False: os << "false"; break;
    case FormulaKind::Cmp: os << f.lhs().to_string() << ' ' << to_string(f.op()) << ' ' << f.rhs().to_string(); break;
    case FormulaKind::Not:
        os << '!';
        os << '(';
        print(os, f.children()[0]);
        os << ')';
        break;
    case FormulaKind::And:
    case FormulaKind::Or:
        for (std::size_t i = 0; i < f.children().size(); ++i) {
            if (i) {
                os << (f.kind() == FormulaKind::And ? " && " : " || ");
            }
            print_child(os, f.children()[i]);
        }
        break;
    case FormulaKind::Implies:
        print_child(os, f.children()[0]);
        os << " -> ";
        print_child(os, f.children()[1]);
        break;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
        os << (f.kind() == FormulaKind::Forall ? "forall " : "exists ");
        for (std::size_t i = 0; i < f.bound().size(); ++i) {
            if (i) {
                os << ", ";
            }
            print_bound(os, f.bound()[i]);
        }
        os << " . ";
        print_child(os, f.body());
        break;
    }
}

}  // namespace

std::string Formula::to_string() const {
    std::ostringstream os;
    print(os, *this);
    return os.str();
}

}  // namespace apc
