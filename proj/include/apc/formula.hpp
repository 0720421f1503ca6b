// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apc/expr.hpp"

namespace apc {

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

CmpOp negate(CmpOp op);
const char* to_string(CmpOp op);

enum class FormulaKind : std::uint8_t { True, False, Cmp, Not, And, Or, Implies, Forall, Exists };

/// A path counter bound by a quantifier together with its range:
/// lower <= var < upper, lower <= var <= upper, or lower <= var (no upper).
struct BoundVar {
    Counter var;
    Expr lower;
    std::optional<Expr> upper;
    bool upper_inclusive = false;

    friend bool operator==(const BoundVar&, const BoundVar&) = default;
};

struct FormulaNode;

/// Immutable formula. Constructors fold constants, absorb true/false, flatten
/// conjunctions/disjunctions and push negation into comparisons.
///
/// Quantifiers bind path counters only and always carry their range, so
///   ∀x∈[lo,hi). φ   means ∀x (lo <= x < hi → φ)
///   ∃x∈[lo,hi]. φ   means ∃x (lo <= x <= hi ∧ φ)
class Formula {
public:
    Formula();  // true

    static Formula truth(bool value);
    static Formula cmp(CmpOp op, Expr lhs, Expr rhs);
    static Formula negation(const Formula& f);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    static Formula implies(const Formula& lhs, const Formula& rhs);
    static Formula forall(std::vector<BoundVar> vars, const Formula& body);
    static Formula exists(std::vector<BoundVar> vars, const Formula& body);

    [[nodiscard]] FormulaKind kind() const;
    [[nodiscard]] CmpOp op() const;
    [[nodiscard]] const Expr& lhs() const;
    [[nodiscard]] const Expr& rhs() const;
    [[nodiscard]] const std::vector<Formula>& children() const;
    [[nodiscard]] const std::vector<BoundVar>& bound() const;
    /// Body of a quantifier.
    [[nodiscard]] const Formula& body() const { return children().front(); }

    [[nodiscard]] bool is_true() const { return kind() == FormulaKind::True; }
    [[nodiscard]] bool is_false() const { return kind() == FormulaKind::False; }
    [[nodiscard]] bool is_quantifier() const {
        return kind() == FormulaKind::Forall || kind() == FormulaKind::Exists;
    }

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Formula& a, const Formula& b);

    [[nodiscard]] const FormulaNode* node() const { return node_.get(); }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    friend Formula make_formula(FormulaNode);
    std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
    FormulaKind kind = FormulaKind::True;
    std::size_t hash = 0;
    CmpOp op = CmpOp::Eq;
    Expr lhs;
    Expr rhs;
    std::vector<Formula> children;
    std::vector<BoundVar> bound;
};

inline Formula operator&&(const Formula& a, const Formula& b) { return Formula::conj({a, b}); }
inline Formula operator||(const Formula& a, const Formula& b) { return Formula::disj({a, b}); }
inline Formula operator!(const Formula& a) { return Formula::negation(a); }

/// Capture-avoiding simultaneous substitution. Bound counters that would
/// capture a free counter of a replacement are renamed apart first.
Formula substitute(const Formula& f, const Substitution& s);

bool contains_star(const Formula& f);
bool has_quantifiers(const Formula& f);
bool mentions_counter(const Formula& f, const Counter& c);
std::set<Counter> free_counters(const Formula& f);
std::set<Counter> all_counters(const Formula& f);
std::set<std::string> symbols_of(const Formula& f);
std::map<std::string, std::size_t> functions_of(const Formula& f);
bool is_nonlinear(const Formula& f);
std::size_t formula_size(const Formula& f);

/// Weakens `f` by replacing every ★-tainted predicate with `true` in positive
/// positions and with `false` in negative ones (under ¬ or in an implication
/// antecedent). On a conjunction of literals this removes exactly the
/// ★-containing conjuncts.
Formula drop_star_predicates(const Formula& f);

/// Folds comparisons that follow from every counter in `nonneg` being >= 0,
/// in addition to the bounds of enclosing quantifiers.
Formula simplify_with_counter_bounds(const Formula& f, const std::set<Counter>& nonneg = {});

/// Conjunction view: the top-level conjuncts of `f`.
std::vector<Formula> conjuncts(const Formula& f);

}  // namespace apc
