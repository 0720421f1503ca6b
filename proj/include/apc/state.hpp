// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "apc/formula.hpp"

namespace apc {

/// Maps every scalar variable to a symbolic expression. Array variables always
/// denote their own function symbol Â, so they are not stored.
class SymbolicState {
public:
    SymbolicState() = default;

    /// θ(a) = â for every listed scalar.
    static SymbolicState identity(const std::vector<std::string>& scalars);
    /// θ(a) = ★ for every listed scalar.
    static SymbolicState unknown(const std::vector<std::string>& scalars);

    [[nodiscard]] const Expr& at(const std::string& var) const;
    [[nodiscard]] bool contains(const std::string& var) const { return values_.contains(var); }
    /// θ[a → e]
    [[nodiscard]] SymbolicState with(const std::string& var, Expr value) const;
    void set(const std::string& var, Expr value) { values_[var] = std::move(value); }

    [[nodiscard]] const std::map<std::string, Expr>& values() const { return values_; }

    /// θ⟨·⟩ as a substitution â ↦ θ(a).
    [[nodiscard]] Substitution as_substitution() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const SymbolicState&, const SymbolicState&) = default;

private:
    std::map<std::string, Expr> values_;
};

/// θ(·): replaces program variables by their values and array reads A[e] by Â(θ(e)).
Expr apply_state_vars(const SymbolicState& theta, const Expr& e);
Formula apply_state_vars(const SymbolicState& theta, const Formula& f);

/// θ⟨·⟩: replaces every symbol â by θ(a); function symbols and counters stay.
Expr apply_state_symbols(const SymbolicState& theta, const Expr& e);
Formula apply_state_symbols(const SymbolicState& theta, const Formula& f);

/// θ1⟨θ2⟩: the effect of running code with effect θ1 and then code with effect θ2.
SymbolicState compose_states(const SymbolicState& first, const SymbolicState& second);

}  // namespace apc
