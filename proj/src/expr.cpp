// SPDX-License-Identifier: Apache-2.0
#include "apc/expr.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

namespace apc {

std::string Counter::display() const {
    std::string s = kind == CounterKind::Kappa ? "κ" : "τ";
    s += std::to_string(id);
    if (instance != 0) {
        s += "#" + std::to_string(instance);
    }
    return s;
}

std::string Counter::smt_name() const {
    std::string s = kind == CounterKind::Kappa ? "kappa$" : "tau$";
    s += std::to_string(id);
    if (instance != 0) {
        s += "#" + std::to_string(instance);
    }
    return s;
}

Int checked_add(Int a, Int b) {
    Int r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw ArithmeticOverflow("integer overflow in addition");
    }
    return r;
}

Int checked_mul(Int a, Int b) {
    Int r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ArithmeticOverflow("integer overflow in multiplication");
    }
    return r;
}

std::optional<Int> euclid_div(Int a, Int b) {
    if (b == 0 || (a == std::numeric_limits<Int>::min() && b == -1)) {
        return std::nullopt;
    }
    Int q = a / b;
    Int r = a % b;
    if (r < 0) {
        q = b > 0 ? q - 1 : q + 1;
    }
    return q;
}

std::optional<Int> euclid_mod(Int a, Int b) {
    if (b == 0) {
        return std::nullopt;
    }
    if (b == -1) {
        return 0;
    }
    Int r = a % b;
    if (r < 0) {
        r += b > 0 ? b : -b;
    }
    return r;
}

namespace {

std::size_t combine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::strong_ordering compare_nodes(const ExprNode& a, const ExprNode& b);

std::strong_ordering compare_args(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (auto c = compare_nodes(*a[i].node(), *b[i].node()); c != 0) {
            return c;
        }
    }
    return a.size() <=> b.size();
}

std::strong_ordering compare_nodes(const ExprNode& a, const ExprNode& b) {
    if (&a == &b) {
        return std::strong_ordering::equal;
    }
    if (auto c = a.kind <=> b.kind; c != 0) {
        return c;
    }
    switch (a.kind) {
    case ExprKind::Int: return a.value <=> b.value;
    case ExprKind::Star: return std::strong_ordering::equal;
    case ExprKind::Counter: return a.counter <=> b.counter;
    case ExprKind::Symbol:
    case ExprKind::Var: return a.name.compare(b.name) <=> 0;
    case ExprKind::Apply:
    case ExprKind::ArrayRead:
        if (auto c = a.name.compare(b.name) <=> 0; c != 0) {
            return c;
        }
        return compare_args(a.args, b.args);
    case ExprKind::Div:
    case ExprKind::Mod:
    case ExprKind::Mul:
    case ExprKind::Add: return compare_args(a.args, b.args);
    }
    return std::strong_ordering::equal;
}

using Monomial = std::vector<Expr>;

std::pair<Monomial, Int> monomial_of(const Expr& e) {
    if (e.kind() == ExprKind::Mul) {
        const auto& a = e.args();
        if (a.front().is_int()) {
            return {Monomial(a.begin() + 1, a.end()), a.front().value()};
        }
        return {a, 1};
    }
    return {{e}, 1};
}

Monomial merge_factors(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

Expr make_node(ExprKind kind, Int value, std::string name, Counter counter, std::vector<Expr> args) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->value = value;
    node->name = std::move(name);
    node->counter = counter;
    node->args = std::move(args);
    std::size_t h = static_cast<std::size_t>(kind);
    h = combine(h, std::hash<Int>{}(value));
    h = combine(h, std::hash<std::string>{}(node->name));
    h = combine(h, (static_cast<std::size_t>(counter.kind) << 40) ^ (static_cast<std::size_t>(counter.id) << 8) ^
                       counter.instance);
    for (const auto& a : node->args) {
        h = combine(h, a.node()->hash);
    }
    node->hash = h;
    return Expr(std::move(node));
}

Expr::Expr() : Expr(integer(0)) {}

Expr Expr::integer(Int v) { return make_node(ExprKind::Int, v, {}, {}, {}); }
Expr Expr::symbol(std::string n) { return make_node(ExprKind::Symbol, 0, std::move(n), {}, {}); }
Expr Expr::var(std::string n) { return make_node(ExprKind::Var, 0, std::move(n), {}, {}); }
Expr Expr::counter(Counter c) { return make_node(ExprKind::Counter, 0, {}, c, {}); }
Expr Expr::star() {
    static const Expr s = make_node(ExprKind::Star, 0, {}, {}, {});
    return s;
}
Expr Expr::apply(std::string array, std::vector<Expr> args) {
    return make_node(ExprKind::Apply, 0, std::move(array), {}, std::move(args));
}
Expr Expr::array_read(std::string array, std::vector<Expr> args) {
    return make_node(ExprKind::ArrayRead, 0, std::move(array), {}, std::move(args));
}

ExprKind Expr::kind() const { return node_->kind; }
Int Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Counter Expr::counter_value() const { return node_->counter; }
const std::vector<Expr>& Expr::args() const { return node_->args; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) {
        return true;
    }
    if (a.node_->hash != b.node_->hash) {
        return false;
    }
    return compare_nodes(*a.node_, *b.node_) == 0;
}

std::strong_ordering operator<=>(const Expr& a, const Expr& b) { return compare_nodes(*a.node_, *b.node_); }

Polynomial Polynomial::of(const Expr& e) {
    Polynomial p;
    switch (e.kind()) {
    case ExprKind::Int: p.constant = e.value(); break;
    case ExprKind::Add:
        for (const auto& t : e.args()) {
            if (t.is_int()) {
                p.constant = checked_add(p.constant, t.value());
            } else {
                auto [m, c] = monomial_of(t);
                p.terms.emplace(std::move(m), c);
            }
        }
        break;
    default: {
        auto [m, c] = monomial_of(e);
        p.terms.emplace(std::move(m), c);
    }
    }
    return p;
}

Expr Polynomial::to_expr() const {
    std::vector<Expr> parts;
    for (const auto& [m, c] : terms) {
        if (c == 0) {
            continue;
        }
        if (c == 1 && m.size() == 1) {
            parts.push_back(m.front());
            continue;
        }
        std::vector<Expr> factors;
        if (c != 1) {
            factors.push_back(Expr::integer(c));
        }
        factors.insert(factors.end(), m.begin(), m.end());
        parts.push_back(make_node(ExprKind::Mul, 0, {}, {}, std::move(factors)));
    }
    if (parts.empty()) {
        return Expr::integer(constant);
    }
    if (parts.size() == 1 && constant == 0) {
        return parts.front();
    }
    if (constant != 0) {
        parts.push_back(Expr::integer(constant));
    }
    return make_node(ExprKind::Add, 0, {}, {}, std::move(parts));
}

namespace {

Polynomial add_poly(Polynomial a, const Polynomial& b, Int scale) {
    a.constant = checked_add(a.constant, checked_mul(scale, b.constant));
    for (const auto& [m, c] : b.terms) {
        auto& slot = a.terms[m];
        slot = checked_add(slot, checked_mul(scale, c));
        if (slot == 0) {
            a.terms.erase(m);
        }
    }
    return a;
}

Polynomial mul_poly(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.constant = checked_mul(a.constant, b.constant);
    auto add_term = [&r](Monomial m, Int c) {
        if (c == 0) {
            return;
        }
        auto& slot = r.terms[m];
        slot = checked_add(slot, c);
        if (slot == 0) {
            r.terms.erase(m);
        }
    };
    for (const auto& [m, c] : a.terms) {
        add_term(m, checked_mul(c, b.constant));
    }
    for (const auto& [m, c] : b.terms) {
        add_term(m, checked_mul(c, a.constant));
    }
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            add_term(merge_factors(ma, mb), checked_mul(ca, cb));
        }
    }
    return r;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_star() || b.is_star()) {
        return Expr::star();
    }
    return add_poly(Polynomial::of(a), Polynomial::of(b), 1).to_expr();
}

Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_star() || b.is_star()) {
        return Expr::star();
    }
    return add_poly(Polynomial::of(a), Polynomial::of(b), -1).to_expr();
}

Expr operator-(const Expr& a) { return Expr::integer(0) - a; }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_star() || b.is_star()) {
        return Expr::star();
    }
    return mul_poly(Polynomial::of(a), Polynomial::of(b)).to_expr();
}

Expr div(const Expr& a, const Expr& b) {
    if (a.is_star() || b.is_star()) {
        return Expr::star();
    }
    if (b.is_int(1)) {
        return a;
    }
    if (a.is_int() && b.is_int()) {
        if (auto q = euclid_div(a.value(), b.value())) {
            return Expr::integer(*q);
        }
    }
    return make_node(ExprKind::Div, 0, {}, {}, {a, b});
}

Expr mod(const Expr& a, const Expr& b) {
    if (a.is_star() || b.is_star()) {
        return Expr::star();
    }
    if (b.is_int(1) || b.is_int(-1)) {
        return Expr::integer(0);
    }
    if (a.is_int() && b.is_int()) {
        if (auto r = euclid_mod(a.value(), b.value())) {
            return Expr::integer(*r);
        }
    }
    return make_node(ExprKind::Mod, 0, {}, {}, {a, b});
}

namespace {

Expr rebuild(const Expr& e, std::vector<Expr> args) {
    switch (e.kind()) {
    case ExprKind::Add: {
        Expr acc = Expr::integer(0);
        for (const auto& a : args) {
            acc = acc + a;
        }
        return acc;
    }
    case ExprKind::Mul: {
        Expr acc = Expr::integer(1);
        for (const auto& a : args) {
            acc = acc * a;
        }
        return acc;
    }
    case ExprKind::Div: return div(args[0], args[1]);
    case ExprKind::Mod: return mod(args[0], args[1]);
    case ExprKind::Apply: return Expr::apply(e.name(), std::move(args));
    case ExprKind::ArrayRead: return Expr::array_read(e.name(), std::move(args));
    default: return e;
    }
}

}  // namespace

Expr substitute(const Expr& e, const Substitution& s) {
    if (s.empty()) {
        return e;
    }
    switch (e.kind()) {
    case ExprKind::Counter: {
        auto it = s.find(SubstKey::of(e.counter_value()));
        return it == s.end() ? e : it->second;
    }
    case ExprKind::Symbol: {
        auto it = s.find(SubstKey::of_symbol(e.name()));
        return it == s.end() ? e : it->second;
    }
    case ExprKind::Int:
    case ExprKind::Star:
    case ExprKind::Var: return e;
    default: break;
    }
    std::vector<Expr> args;
    args.reserve(e.args().size());
    bool changed = false;
    for (const auto& a : e.args()) {
        args.push_back(substitute(a, s));
        changed = changed || !(args.back().node() == a.node());
    }
    return changed ? rebuild(e, std::move(args)) : e;
}

bool contains_star(const Expr& e) {
    if (e.is_star()) {
        return true;
    }
    return std::any_of(e.args().begin(), e.args().end(), [](const Expr& a) { return contains_star(a); });
}

bool mentions_symbol(const Expr& e, const std::string& name) {
    if (e.kind() == ExprKind::Symbol) {
        return e.name() == name;
    }
    return std::any_of(e.args().begin(), e.args().end(),
                       [&](const Expr& a) { return mentions_symbol(a, name); });
}

void collect_counters(const Expr& e, std::set<Counter>& out) {
    if (e.kind() == ExprKind::Counter) {
        out.insert(e.counter_value());
    }
    for (const auto& a : e.args()) {
        collect_counters(a, out);
    }
}

bool mentions_counter(const Expr& e) {
    if (e.kind() == ExprKind::Counter) {
        return true;
    }
    return std::any_of(e.args().begin(), e.args().end(), [](const Expr& a) { return mentions_counter(a); });
}

void collect_symbols(const Expr& e, std::set<std::string>& out) {
    if (e.kind() == ExprKind::Symbol) {
        out.insert(e.name());
    }
    for (const auto& a : e.args()) {
        collect_symbols(a, out);
    }
}

void collect_functions(const Expr& e, std::map<std::string, std::size_t>& out) {
    if (e.kind() == ExprKind::Apply) {
        out.emplace(e.name(), e.args().size());
    }
    for (const auto& a : e.args()) {
        collect_functions(a, out);
    }
}

bool is_nonlinear(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Mul: {
        std::size_t non_literal = 0;
        for (const auto& a : e.args()) {
            non_literal += a.is_int() ? 0 : 1;
        }
        if (non_literal >= 2) {
            return true;
        }
        break;
    }
    case ExprKind::Div:
    case ExprKind::Mod:
        if (!e.args()[1].is_int()) {
            return true;
        }
        break;
    default: break;
    }
    return std::any_of(e.args().begin(), e.args().end(), [](const Expr& a) { return is_nonlinear(a); });
}

std::size_t expr_size(const Expr& e) {
    std::size_t n = 1;
    for (const auto& a : e.args()) {
        n += expr_size(a);
    }
    return n;
}

namespace {

bool is_compound(const Expr& e) {
    return e.kind() == ExprKind::Add || e.kind() == ExprKind::Mul || e.kind() == ExprKind::Div ||
           e.kind() == ExprKind::Mod || (e.is_int() && e.value() < 0);
}

void print(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e) {
    if (is_compound(e)) {
        os << '(';
        print(os, e);
        os << ')';
    } else {
        print(os, e);
    }
}

// Prints a term of a sum without its sign; returns true when negative.
bool print_term_magnitude(std::ostream& os, const Expr& t) {
    if (t.kind() == ExprKind::Mul && t.args().front().is_int() && t.args().front().value() < 0) {
        const Int c = t.args().front().value();
        std::vector<Expr> rest(t.args().begin() + 1, t.args().end());
        if (c != -1) {
            os << -c << '*';
        }
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (i) {
                os << '*';
            }
            print_operand(os, rest[i]);
        }
        return true;
    }
    if (t.is_int() && t.value() < 0) {
        os << -t.value();
        return true;
    }
    print(os, t);
    return false;
}

void print(std::ostream& os, const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Int: os << e.value(); break;
    case ExprKind::Star: os << "★"; break;
    case ExprKind::Counter: os << e.counter_value().display(); break;
    case ExprKind::Symbol:
    case ExprKind::Var: os << e.name(); break;
    case ExprKind::Apply:
        os << e.name() << '(';
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            if (i) {
                os << ", ";
            }
            print(os, e.args()[i]);
        }
        os << ')';
        break;
    case ExprKind::ArrayRead:
        os << e.name();
        for (const auto& a : e.args()) {
            os << '[';
            print(os, a);
            os << ']';
        }
        break;
    case ExprKind::Add:
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            std::ostringstream term;
            const bool negative = print_term_magnitude(term, e.args()[i]);
            if (i == 0) {
                os << (negative ? "-" : "") << term.str();
            } else {
                os << (negative ? " - " : " + ") << term.str();
            }
        }
        break;
    case ExprKind::Mul:
        for (std::size_t i = 0; i < e.args().size(); ++i) {
            if (i) {
                os << '*';
            }
            print_operand(os, e.args()[i]);
        }
        break;
    case ExprKind::Div:
    case ExprKind::Mod:
        print_operand(os, e.args()[0]);
        os << (e.kind() == ExprKind::Div ? " / " : " % ");
        print_operand(os, e.args()[1]);
        break;
    }
}

}  // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    print(os, *this);
    return os.str();
}

}  // namespace apc
