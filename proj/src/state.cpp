// SPDX-License-Identifier: Apache-2.0
#include "apc/state.hpp"

#include <sstream>
#include <stdexcept>

namespace apc {

SymbolicState SymbolicState::identity(const std::vector<std::string>& scalars) {
    SymbolicState s;
    for (const auto& v : scalars) {
        s.values_.emplace(v, Expr::symbol(v));
    }
    return s;
}

SymbolicState SymbolicState::unknown(const std::vector<std::string>& scalars) {
    SymbolicState s;
    for (const auto& v : scalars) {
        s.values_.emplace(v, Expr::star());
    }
    return s;
}

const Expr& SymbolicState::at(const std::string& var) const {
    auto it = values_.find(var);
    if (it == values_.end()) {
        throw std::out_of_range("symbolic state has no variable '" + var + "'");
    }
    return it->second;
}

SymbolicState SymbolicState::with(const std::string& var, Expr value) const {
    SymbolicState s = *this;
    s.values_[var] = std::move(value);
    return s;
}

Substitution SymbolicState::as_substitution() const {
    Substitution sub;
    for (const auto& [v, e] : values_) {
        if (!(e.kind() == ExprKind::Symbol && e.name() == v)) {
            sub.emplace(SubstKey::of_symbol(v), e);
        }
    }
    return sub;
}

std::string SymbolicState::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [v, e] : values_) {
        os << (first ? "" : ", ") << v << " -> " << e.to_string();
        first = false;
    }
    os << '}';
    return os.str();
}

Expr apply_state_vars(const SymbolicState& theta, const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Var: return theta.at(e.name());
    case ExprKind::Int:
    case ExprKind::Star:
    case ExprKind::Symbol:
    case ExprKind::Counter: return e;
    default: break;
    }
    std::vector<Expr> args;
    for (const auto& a : e.args()) {
        args.push_back(apply_state_vars(theta, a));
    }
    switch (e.kind()) {
    case ExprKind::ArrayRead:
    case ExprKind::Apply: return Expr::apply(e.name(), std::move(args));
    case ExprKind::Div: return div(args[0], args[1]);
    case ExprKind::Mod: return mod(args[0], args[1]);
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
    default: return e;
    }
}

Formula apply_state_vars(const SymbolicState& theta, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Cmp:
        return Formula::cmp(f.op(), apply_state_vars(theta, f.lhs()), apply_state_vars(theta, f.rhs()));
    case FormulaKind::Not: return Formula::negation(apply_state_vars(theta, f.children()[0]));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
            parts.push_back(apply_state_vars(theta, c));
        }
        return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Implies:
        return Formula::implies(apply_state_vars(theta, f.children()[0]), apply_state_vars(theta, f.children()[1]));
    case FormulaKind::Forall:
    case FormulaKind::Exists: throw std::invalid_argument("program formulas are quantifier-free");
    }
    return f;
}

Expr apply_state_symbols(const SymbolicState& theta, const Expr& e) {
    return substitute(e, theta.as_substitution());
}

Formula apply_state_symbols(const SymbolicState& theta, const Formula& f) {
    return substitute(f, theta.as_substitution());
}

SymbolicState compose_states(const SymbolicState& first, const SymbolicState& second) {
    const Substitution sub = first.as_substitution();
    SymbolicState out;
    for (const auto& [v, e] : second.values()) {
        out.set(v, substitute(e, sub));
    }
    return out;
}

}  // namespace apc
