// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <stdexcept>

#include "apc/formula.hpp"

namespace apc {

inline constexpr Int default_k = 25;

/// Quantifier-free weakening of a necessary condition. Every counter that was
/// existentially bound is now a free constant (a counter with a nonzero
/// instance number) listed in `freed`.
struct KBoundedFormula {
    Formula formula;
    Int k = default_k;
    std::set<Counter> freed;
};

/// Raised for quantifiers the transform does not know how to weaken.
class UnsupportedQuantifier : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Replaces each ∀τ∈[0,κ). ρ(τ) by ⋀_{c=0..k} (c < κ → ρ(c)), innermost
/// first, then turns every ∃-bound counter into a fresh constant constrained
/// by its range. Only ∀ in positive and ∃ in positive position are accepted.
KBoundedFormula k_bound_transform(const Formula& phi, Int k = default_k);

}  // namespace apc
