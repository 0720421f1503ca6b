// SPDX-License-Identifier: Apache-2.0
#include "apc/qelim.hpp"

namespace apc {

namespace {

std::vector<Formula> map_children(const Formula& f, bool positive, auto&& fn) {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < f.children().size(); ++i) {
        // the antecedent of an implication and the operand of ¬ flip polarity
        const bool flip = f.kind() == FormulaKind::Not || (f.kind() == FormulaKind::Implies && i == 0);
        out.push_back(fn(f.children()[i], flip ? !positive : positive));
    }
    return out;
}

Formula rebuild(const Formula& f, std::vector<Formula> kids) {
    switch (f.kind()) {
    case FormulaKind::Not: return Formula::negation(kids[0]);
    case FormulaKind::And: return Formula::conj(std::move(kids));
    case FormulaKind::Or: return Formula::disj(std::move(kids));
    case FormulaKind::Implies: return Formula::implies(kids[0], kids[1]);
    case FormulaKind::Forall: return Formula::forall(f.bound(), kids[0]);
    case FormulaKind::Exists: return Formula::exists(f.bound(), kids[0]);
    default: return f;
    }
}

Formula expand_universals(const Formula& f, bool positive, Int k) {
    if (f.kind() == FormulaKind::True || f.kind() == FormulaKind::False || f.kind() == FormulaKind::Cmp) {
        return f;
    }
    auto kids = map_children(f, positive, [k](const Formula& c, bool pos) { return expand_universals(c, pos, k); });
    if (f.kind() != FormulaKind::Forall) {
        return rebuild(f, std::move(kids));
    }
    if (!positive) {
        throw UnsupportedQuantifier("universal quantifier in negative position: " + f.to_string());
    }
    if (f.bound().size() != 1 || !f.bound()[0].upper || f.bound()[0].upper_inclusive ||
        !f.bound()[0].lower.is_int(0)) {
        throw UnsupportedQuantifier("universal quantifier not of the form forall t in [0, u): " + f.to_string());
    }
    const BoundVar& bv = f.bound()[0];
    std::vector<Formula> instances;
    for (Int c = 0; c <= k; ++c) {
        const Expr lit = Expr::integer(c);
        const Substitution at{{SubstKey::of(bv.var), lit}};
        instances.push_back(
            Formula::implies(Formula::cmp(CmpOp::Lt, lit, substitute(*bv.upper, at)), substitute(kids[0], at)));
    }
    return Formula::conj(std::move(instances));
}

class Freer {
public:
    Formula run(const Formula& f, bool positive) {
        switch (f.kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Cmp: return f;
        case FormulaKind::Forall:
            throw UnsupportedQuantifier("universal quantifier left after expansion: " + f.to_string());
        case FormulaKind::Exists: {
            if (!positive) {
                throw UnsupportedQuantifier("existential quantifier in negative position: " + f.to_string());
            }
            Substitution sub;
            std::vector<Formula> parts;
            for (const auto& bv : f.bound()) {
                const Counter c{bv.var.kind, bv.var.id, next_++};
                freed.insert(c);
                const Expr x = Expr::counter(c);
                // later bounds may mention earlier bound variables
                parts.push_back(Formula::cmp(CmpOp::Le, substitute(bv.lower, sub), x));
                if (bv.upper) {
                    parts.push_back(
                        Formula::cmp(bv.upper_inclusive ? CmpOp::Le : CmpOp::Lt, x, substitute(*bv.upper, sub)));
                }
                sub[SubstKey::of(bv.var)] = x;
            }
            parts.push_back(run(substitute(f.body(), sub), true));
            return Formula::conj(std::move(parts));
        }
        default: break;
        }
        return rebuild(f, map_children(f, positive, [this](const Formula& c, bool pos) { return run(c, pos); }));
    }

    std::set<Counter> freed;

private:
    std::uint32_t next_ = 1;
};

}  // namespace

KBoundedFormula k_bound_transform(const Formula& phi, Int k) {
    if (k < 0) {
        throw std::invalid_argument("K must be nonnegative");
    }
    const Formula expanded = expand_universals(phi, true, k);
    Freer freer;
    const Formula body = freer.run(expanded, true);
    std::vector<Formula> parts;
    for (const auto& c : freer.freed) {
        parts.push_back(Formula::cmp(CmpOp::Ge, Expr::counter(c), Expr::integer(0)));
    }
    parts.push_back(body);
    return {Formula::conj(std::move(parts)), k, std::move(freer.freed)};
}

}  // namespace apc
