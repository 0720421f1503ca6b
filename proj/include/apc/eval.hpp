// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apc/formula.hpp"

namespace apc {

/// A total function over integer tuples: finitely many explicit cells plus a
/// default for everything else.
struct ArrayValue {
    std::map<std::vector<Int>, Int> cells;
    Int default_value = 0;

    [[nodiscard]] Int at(const std::vector<Int>& index) const;
    friend bool operator==(const ArrayValue&, const ArrayValue&) = default;
};

/// Values for symbols â (and program variables a), array symbols Â (and
/// program arrays A) and path counters.
struct Valuation {
    std::map<std::string, Int> symbols;
    std::map<std::string, ArrayValue> arrays;
    std::map<Counter, Int> counters;
    /// ∃ over [lo, ∞) is searched on [lo, lo + existential_limit] only.
    Int existential_limit = 64;
};

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// nullopt means undefined (division or modulo by zero somewhere that
/// mattered). Throws EvalError for unbound names, ★, or a ∀ without an upper
/// bound.
std::optional<Int> eval_concrete(const Expr& e, const Valuation& val);
/// Three-valued: undefined subterms propagate as in Kleene logic.
std::optional<bool> eval_concrete(const Formula& f, const Valuation& val);

}  // namespace apc
