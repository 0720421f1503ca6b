// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apc/paths.hpp"
#include "apc/state.hpp"

namespace apc {

/// Hands out path-counter ids; shared by every loop of one analysis so that
/// no two loops use the same counter.
class CounterSource {
public:
    [[nodiscard]] std::uint32_t fresh() { return next_.fetch_add(1, std::memory_order_relaxed); }

private:
    std::atomic<std::uint32_t> next_{1};
};

/// A backbone together with the state and abstract path condition obtained by
/// executing it symbolically.
struct BackboneResult {
    Path backbone;
    SymbolicState state;
    Formula condition;
};

/// Effect of a loop as a function of how often each of its backbones is
/// taken. counters[i] counts iterations along backbones[i].
struct LoopSummary {
    NodeId entry;
    std::set<NodeId> body;
    SymbolicState iterated_state;
    Formula looping_condition;
    std::vector<Counter> counters;
    std::vector<Path> backbones;
    std::vector<BackboneResult> inner;
};

/// Extra rule for the improved value of a variable, consulted after the two
/// built-in cases fail. Returns nullopt or ★ when it does not apply.
using ImprovedValueRule =
    std::function<std::optional<Expr>(const std::string& var, const std::vector<SymbolicState>& per_backbone,
                                      const SymbolicState& current, const std::vector<Counter>& counters)>;

struct EngineOptions {
    std::size_t max_backbones = default_backbone_cap;
    std::size_t max_depth = 64;
    std::vector<ImprovedValueRule> extra_rules;
};

/// Improved value of `var` from the per-backbone states of one loop:
/// â when no backbone changes it, â + Σ dᵢ·κᵢ when each backbone adds a
/// loop-invariant amount dᵢ (or nothing), ★ otherwise.
Expr improved_value(const std::string& var, const std::vector<SymbolicState>& per_backbone,
                    const SymbolicState& current, const std::vector<Counter>& counters,
                    const std::vector<ImprovedValueRule>& extra_rules = {});

/// The looping condition: one conjunct per loop backbone i stating that in
/// every iteration τᵢ < κᵢ along it, the backbone's condition held for some
/// earlier counts of the other backbones and some inner-loop counts.
Formula build_looping_condition(const std::vector<BackboneResult>& results, const SymbolicState& iterated,
                                const std::vector<Counter>& counters);

/// Symbolic execution of backbones with loops replaced by their summaries.
/// Summaries are cached per (body, entry) for the lifetime of the object.
class Engine {
public:
    explicit Engine(EngineOptions options = {});

    std::vector<BackboneResult> execute_backbones(const Flowgraph& fg, const std::vector<Path>& backbones);
    LoopSummary compute_summary(const std::vector<BackboneResult>& results, const std::vector<std::string>& scalars);

    /// ⋁ᵢ ∃κ⃗ᵢ ≥ 0. φᵢ over all backbones of `fg`; false when there are none.
    Formula necessary_condition(const Flowgraph& fg);

    /// Results of the last necessary_condition call.
    [[nodiscard]] const std::vector<BackboneResult>& last_results() const { return last_results_; }
    [[nodiscard]] const std::map<std::pair<std::set<NodeId>, NodeId>, LoopSummary>& summaries() const {
        return summaries_;
    }

private:
    std::vector<BackboneResult> execute(const Flowgraph& fg, const std::vector<Path>& backbones, std::size_t depth);
    const LoopSummary& summary_for(const Flowgraph& fg, const LoopInfo& loop, std::size_t depth);

    EngineOptions options_;
    CounterSource counters_;
    std::map<std::pair<std::set<NodeId>, NodeId>, LoopSummary> summaries_;
    std::vector<BackboneResult> last_results_;
};

/// Convenience wrapper with a fresh engine.
Formula necessary_condition(const Flowgraph& fg, const EngineOptions& options = {});

}  // namespace apc
