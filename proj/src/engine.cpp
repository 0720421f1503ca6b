// SPDX-License-Identifier: Apache-2.0
#include "apc/engine.hpp"

#include <algorithm>

namespace apc {

Expr improved_value(const std::string& var, const std::vector<SymbolicState>& per_backbone,
                    const SymbolicState& current, const std::vector<Counter>& counters,
                    const std::vector<ImprovedValueRule>& extra_rules) {
    const Expr initial = Expr::symbol(var);
    bool unchanged = true;
    bool additive = true;
    Expr sum = initial;
    const Substitution sub = current.as_substitution();
    for (std::size_t i = 0; i < per_backbone.size() && additive; ++i) {
        const Expr& value = per_backbone[i].at(var);
        if (value == initial) {
            continue;
        }
        unchanged = false;
        if (contains_star(value)) {
            additive = false;
            break;
        }
        const Expr delta = value - initial;
        if (mentions_symbol(delta, var)) {
            additive = false;
            break;
        }
        const Expr invariant = substitute(delta, sub);
        if (contains_star(invariant) || mentions_counter(invariant)) {
            additive = false;
            break;
        }
        sum = sum + delta * Expr::counter(counters[i]);
    }
    if (unchanged) {
        return initial;
    }
    if (additive) {
        return sum;
    }
    for (const auto& rule : extra_rules) {
        if (auto e = rule(var, per_backbone, current, counters); e && !e->is_star()) {
            return *e;
        }
    }
    return Expr::star();
}

Formula build_looping_condition(const std::vector<BackboneResult>& results, const SymbolicState& iterated,
                                const std::vector<Counter>& counters) {
    Substitution to_tau;
    for (const auto& k : counters) {
        to_tau.emplace(SubstKey::of(k), Expr::counter(k.as_tau()));
    }
    const std::set<Counter> own(counters.begin(), counters.end());
    std::vector<Formula> parts;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const Formula& cond = results[i].condition;
        std::vector<BoundVar> inner;
        for (const auto& c : free_counters(cond)) {
            if (!own.contains(c)) {
                inner.push_back({c, Expr::integer(0), std::nullopt, false});
            }
        }
        const Formula gamma = drop_star_predicates(substitute(apply_state_symbols(iterated, cond), to_tau));
        std::vector<BoundVar> others;
        for (std::size_t j = 0; j < counters.size(); ++j) {
            if (j != i) {
                others.push_back({counters[j].as_tau(), Expr::integer(0), Expr::counter(counters[j]), true});
            }
        }
        others.insert(others.end(), inner.begin(), inner.end());
        const BoundVar iteration{counters[i].as_tau(), Expr::integer(0), Expr::counter(counters[i]), false};
        parts.push_back(Formula::forall({iteration}, Formula::exists(std::move(others), gamma)));
    }
    return Formula::conj(std::move(parts));
}

Engine::Engine(EngineOptions options) : options_(std::move(options)) {}

LoopSummary Engine::compute_summary(const std::vector<BackboneResult>& results,
                                    const std::vector<std::string>& scalars) {
    LoopSummary s;
    std::vector<SymbolicState> states;
    for (const auto& r : results) {
        s.counters.push_back(Counter{CounterKind::Kappa, counters_.fresh(), 0});
        s.backbones.push_back(r.backbone);
        states.push_back(r.state);
    }
    s.iterated_state = SymbolicState::unknown(scalars);
    for (bool change = true; change;) {
        change = false;
        for (const auto& a : scalars) {
            Expr e = improved_value(a, states, s.iterated_state, s.counters, options_.extra_rules);
            if (!e.is_star() && s.iterated_state.at(a).is_star()) {
                s.iterated_state.set(a, std::move(e));
                change = true;
            }
        }
    }
    s.looping_condition = build_looping_condition(results, s.iterated_state, s.counters);
    s.inner = results;
    return s;
}

const LoopSummary& Engine::summary_for(const Flowgraph& fg, const LoopInfo& loop, std::size_t depth) {
    auto key = std::make_pair(loop.body, loop.entry);
    if (auto it = summaries_.find(key); it != summaries_.end()) {
        return it->second;
    }
    const Flowgraph induced = induced_flowgraph(fg, loop);
    const auto inner_backbones = enumerate_backbones(induced, options_.max_backbones);
    const auto inner = execute(induced, inner_backbones, depth + 1);
    LoopSummary s = compute_summary(inner, fg.scalars());
    s.entry = loop.entry;
    s.body = loop.body;
    return summaries_.emplace(std::move(key), std::move(s)).first->second;
}

std::vector<BackboneResult> Engine::execute(const Flowgraph& fg, const std::vector<Path>& backbones,
                                            std::size_t depth) {
    if (depth > options_.max_depth) {
        throw CapExceeded("loop nesting deeper than " + std::to_string(options_.max_depth));
    }
    std::vector<BackboneResult> out;
    for (const auto& bb : backbones) {
        std::map<std::size_t, const LoopSummary*> at;
        for (const auto& loop : loops_along(fg, bb)) {
            at[loop.position] = &summary_for(fg, loop, depth);
        }
        SymbolicState theta = SymbolicState::identity(fg.scalars());
        std::vector<Formula> cond;
        for (std::size_t j = 0; j + 1 < bb.size(); ++j) {
            if (auto it = at.find(j); it != at.end()) {
                cond.push_back(drop_star_predicates(apply_state_symbols(theta, it->second->looping_condition)));
                theta = compose_states(theta, it->second->iterated_state);
            }
            const Edge& e = fg.edge(bb[j], bb[j + 1]);
            if (const auto* assume = std::get_if<Assume>(&e.instr)) {
                Formula g = apply_state_vars(theta, assume->cond);
                if (!contains_star(g)) {
                    cond.push_back(std::move(g));
                }
            } else {
                const auto& assign = std::get<Assign>(e.instr);
                theta.set(assign.var, apply_state_vars(theta, assign.rhs));
            }
        }
        out.push_back({bb, std::move(theta), Formula::conj(std::move(cond))});
    }
    return out;
}

std::vector<BackboneResult> Engine::execute_backbones(const Flowgraph& fg, const std::vector<Path>& backbones) {
    return execute(fg, backbones, 0);
}

Formula Engine::necessary_condition(const Flowgraph& fg) {
    const auto backbones = enumerate_backbones(fg, options_.max_backbones);
    last_results_ = execute(fg, backbones, 0);
    std::vector<Formula> disjuncts;
    for (const auto& r : last_results_) {
        std::vector<BoundVar> vars;
        for (const auto& c : free_counters(r.condition)) {
            vars.push_back({c, Expr::integer(0), std::nullopt, false});
        }
        disjuncts.push_back(Formula::exists(std::move(vars), r.condition));
    }
    return simplify_with_counter_bounds(Formula::disj(std::move(disjuncts)));
}

Formula necessary_condition(const Flowgraph& fg, const EngineOptions& options) {
    Engine engine(options);
    return engine.necessary_condition(fg);
}

}  // namespace apc
