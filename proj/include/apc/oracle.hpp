// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "apc/eval.hpp"
#include "apc/paths.hpp"

namespace apc {

/// Initial values of scalars and contents of the read-only arrays.
struct ConcreteInput {
    std::map<std::string, Int> scalars;
    std::map<std::string, ArrayValue> arrays;

    friend bool operator==(const ConcreteInput&, const ConcreteInput&) = default;
};

struct Trace {
    std::vector<NodeId> visited;
    std::map<std::string, Int> final_store;
    bool reached_target = false;
    bool stuck = false;  // undefined arithmetic blocked execution
    std::string stuck_reason;
    /// For each loop entry on the trace's backbone: how many iterations
    /// followed each backbone of the loop's induced flowgraph.
    std::map<NodeId, std::map<Path, Int>> iteration_counts;
};

inline constexpr std::size_t default_step_bound = 100'000;
inline constexpr std::size_t default_enumeration_cap = 10'000'000;

/// Executes `fg` from its start node, one edge per step. Missing scalars start
/// at 0 and missing arrays are all zero.
Trace concrete_run(const Flowgraph& fg, const ConcreteInput& input, std::size_t step_bound = default_step_bound);

/// Iteration counts per loop entry, derived from a visited node sequence.
std::map<NodeId, std::map<Path, Int>> iteration_counts(const Flowgraph& fg, const Path& visited);

/// Input space for exhaustive search.
struct InputDomain {
    Int scalar_lo = 0;
    Int scalar_hi = 0;
    /// Per-scalar overrides of [scalar_lo, scalar_hi].
    std::map<std::string, std::pair<Int, Int>> scalar_ranges;
    Int value_lo = 0;  // array cell values
    Int value_hi = 0;
    Int index_lo = 0;  // every dimension of every array
    Int index_hi = -1;
    Int array_default = 0;  // cells outside the index range
};

/// Every input of `domain` whose run reaches the target. Throws CapExceeded
/// when the domain has more than `cap` points.
std::vector<ConcreteInput> bounded_reachability(const Flowgraph& fg, const InputDomain& domain,
                                                std::size_t step_bound = default_step_bound,
                                                std::size_t cap = default_enumeration_cap);

/// Reads `name = value`, `A[3] = 1`, `A[1][2] = 5` and `A default 0` lines.
ConcreteInput parse_input(std::string_view text);
std::string format_input(const ConcreteInput& input);

}  // namespace apc
