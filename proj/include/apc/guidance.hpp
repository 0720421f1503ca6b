// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "apc/dsl.hpp"
#include "apc/oracle.hpp"
#include "apc/smt.hpp"

namespace apc {

/// A pending location of some external symbolic executor with the path
/// condition under which it was reached, over input symbols.
struct FrontierEntry {
    NodeId location;
    Formula condition;
    std::string source;  // original text line, echoed by `prune`
};

/// Reads one `<node> ; <formula>` entry per line; formulas use the DSL syntax
/// over program variables, which stand for their initial values.
std::vector<FrontierEntry> parse_frontier(std::string_view text, const Declarations& decls);

struct PruneResult {
    std::vector<FrontierEntry> kept;
    std::vector<SolverVerdict> verdicts;  // one per input entry
    std::vector<std::string> warnings;
};

/// Keeps the entries whose condition is consistent with φ̂. Entries whose
/// check is not a definite unsat are kept. At most `workers` entries are
/// checked at the same time; the output preserves input order.
PruneResult prune_frontier(const std::vector<FrontierEntry>& frontier, const Formula& phi_hat,
                           const SolverConfig& config, Int k = default_k, std::size_t workers = 2);

/// Program input read off a sat model. Counters are ignored; scalars the
/// model does not mention are 0 and absent arrays are all zero.
ConcreteInput extract_input(const SolverVerdict& verdict, const Flowgraph& fg);

/// Scalar bounds tried, in order, when the first model does not replay.
inline const std::vector<Int> small_model_bounds{32, 1024};

struct GeneratedTest {
    RaceOutcome outcome;  // decision on φ̂ itself
    std::optional<ConcreteInput> input;
    std::optional<Trace> trace;
    /// Set when the input came from φ̂ ∧ ⋀ -b <= â <= b rather than φ̂.
    std::optional<Int> bound;
};

/// Decides φ̂ and, when sat, replays the extracted input. If that run does not
/// reach the target (typically because the model picked huge scalars), φ̂ is
/// re-solved with every scalar symbol bounded by each of `bounds` in turn and
/// the first input that replays is kept. Otherwise the first input is kept.
GeneratedTest generate_test(const Formula& phi_hat, const Flowgraph& fg, const SolverConfig& config,
                            Int k = default_k, std::size_t step_bound = default_step_bound,
                            const std::vector<Int>& bounds = small_model_bounds);

}  // namespace apc
