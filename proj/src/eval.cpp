// SPDX-License-Identifier: Apache-2.0
#include "apc/eval.hpp"

namespace apc {

Int ArrayValue::at(const std::vector<Int>& index) const {
    auto it = cells.find(index);
    return it == cells.end() ? default_value : it->second;
}

std::optional<Int> eval_concrete(const Expr& e, const Valuation& val) {
    switch (e.kind()) {
    case ExprKind::Int: return e.value();
    case ExprKind::Star: throw EvalError("cannot evaluate an expression containing ★");
    case ExprKind::Symbol:
    case ExprKind::Var: {
        auto it = val.symbols.find(e.name());
        if (it == val.symbols.end()) {
            throw EvalError("unbound symbol '" + e.name() + "'");
        }
        return it->second;
    }
    case ExprKind::Counter: {
        auto it = val.counters.find(e.counter_value());
        if (it == val.counters.end()) {
            throw EvalError("unbound path counter " + e.counter_value().display());
        }
        return it->second;
    }
    case ExprKind::Apply:
    case ExprKind::ArrayRead: {
        auto it = val.arrays.find(e.name());
        if (it == val.arrays.end()) {
            throw EvalError("unbound array '" + e.name() + "'");
        }
        std::vector<Int> idx;
        for (const auto& a : e.args()) {
            auto v = eval_concrete(a, val);
            if (!v) {
                return std::nullopt;
            }
            idx.push_back(*v);
        }
        return it->second.at(idx);
    }
    case ExprKind::Add:
    case ExprKind::Mul: {
        const bool add = e.kind() == ExprKind::Add;
        Int acc = add ? 0 : 1;
        bool undefined = false;
        for (const auto& a : e.args()) {
            auto v = eval_concrete(a, val);
            if (!v) {
                undefined = true;
                continue;
            }
            acc = add ? checked_add(acc, *v) : checked_mul(acc, *v);
        }
        if (undefined) {
            return std::nullopt;
        }
        return acc;
    }
    case ExprKind::Div:
    case ExprKind::Mod: {
        auto a = eval_concrete(e.args()[0], val);
        auto b = eval_concrete(e.args()[1], val);
        if (!a || !b) {
            return std::nullopt;
        }
        return e.kind() == ExprKind::Div ? euclid_div(*a, *b) : euclid_mod(*a, *b);
    }
    }
    return std::nullopt;
}

namespace {

std::optional<bool> compare(CmpOp op, Int a, Int b) {
    switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
    }
    return std::nullopt;
}

std::optional<bool> kleene_not(std::optional<bool> v) {
    if (!v) {
        return std::nullopt;
    }
    return !*v;
}

// Enumerates the bound variables starting at `depth`; `universal` selects ∀
// (all must hold) versus ∃ (one must hold).
std::optional<bool> quantify(const Formula& f, std::size_t depth, Valuation& val, bool universal) {
    const auto& vars = f.bound();
    if (depth == vars.size()) {
        return eval_concrete(f.body(), val);
    }
    const BoundVar& bv = vars[depth];
    auto lo = eval_concrete(bv.lower, val);
    std::optional<Int> hi;
    if (bv.upper) {
        auto u = eval_concrete(*bv.upper, val);
        if (!u) {
            return std::nullopt;
        }
        hi = bv.upper_inclusive ? *u : *u - 1;
    } else if (universal) {
        throw EvalError("cannot evaluate a universal quantifier without an upper bound");
    }
    if (!lo) {
        return std::nullopt;
    }
    if (!hi) {
        hi = checked_add(*lo, val.existential_limit);
    }
    const bool had = val.counters.contains(bv.var);
    const Int saved = had ? val.counters.at(bv.var) : 0;
    bool unknown = false;
    std::optional<bool> result = universal;
    for (Int x = *lo; x <= *hi; ++x) {
        val.counters[bv.var] = x;
        auto r = quantify(f, depth + 1, val, universal);
        if (!r) {
            unknown = true;
        } else if (*r != universal) {
            result = !universal;
            break;
        }
    }
    if (had) {
        val.counters[bv.var] = saved;
    } else {
        val.counters.erase(bv.var);
    }
    if (*result == universal && unknown) {
        return std::nullopt;
    }
    return result;
}

}  // namespace

std::optional<bool> eval_concrete(const Formula& f, const Valuation& val) {
    switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Cmp: {
        auto a = eval_concrete(f.lhs(), val);
        auto b = eval_concrete(f.rhs(), val);
        if (!a || !b) {
            return std::nullopt;
        }
        return compare(f.op(), *a, *b);
    }
    case FormulaKind::Not: return kleene_not(eval_concrete(f.children()[0], val));
    case FormulaKind::And:
    case FormulaKind::Or: {
        const bool is_and = f.kind() == FormulaKind::And;
        bool unknown = false;
        for (const auto& c : f.children()) {
            auto v = eval_concrete(c, val);
            if (!v) {
                unknown = true;
            } else if (*v != is_and) {
                return !is_and;
            }
        }
        if (unknown) {
            return std::nullopt;
        }
        return is_and;
    }
    case FormulaKind::Implies: {
        auto a = eval_concrete(f.children()[0], val);
        if (a && !*a) {
            return true;
        }
        auto b = eval_concrete(f.children()[1], val);
        if (b && *b) {
            return true;
        }
        if (!a || !b) {
            return std::nullopt;
        }
        return false;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        Valuation local = val;
        return quantify(f, 0, local, f.kind() == FormulaKind::Forall);
    }
    }
    return std::nullopt;
}

}  // namespace apc
