// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "apc/engine.hpp"
#include "apc/eval.hpp"
#include "apc/oracle.hpp"
#include "support.hpp"

namespace apc {
namespace {

using testing::coin;
using testing::Rng;
using testing::uniform;

constexpr int cases = 200;

Valuation valuation_of(const ConcreteInput& in) {
    Valuation v;
    v.symbols = in.scalars;
    v.arrays = in.arrays;
    return v;
}

ConcreteInput random_loop_input(Rng& rng) {
    ConcreteInput in;
    for (const char* s : {"x", "y", "n"}) {
        in.scalars[s] = uniform(rng, -2, 4);
    }
    ArrayValue a;
    a.default_value = uniform(rng, 0, 1);
    for (Int i = -3; i <= 8; ++i) {
        if (coin(rng, 0.6)) {
            a.cells[{i}] = uniform(rng, 0, 1);
        }
    }
    in.arrays["A"] = a;
    return in;
}

TEST(EngineProperties, LoopFreeConditionIsExact) {
    Rng rng(0xE0E0'0001);
    int reachable_programs = 0;
    for (int c = 0; c < cases; ++c) {
        const Flowgraph fg = testing::random_loop_free(rng);
        const Formula phi = necessary_condition(fg);
        EXPECT_FALSE(has_quantifiers(phi));
        const auto& vars = fg.scalars();
        std::vector<Int> values(vars.size(), -4);
        bool any = false;
        for (;;) {
            ConcreteInput in;
            for (std::size_t i = 0; i < vars.size(); ++i) {
                in.scalars[vars[i]] = values[i];
            }
            const bool reached = concrete_run(fg, in).reached_target;
            const auto holds = eval_concrete(phi, valuation_of(in));
            ASSERT_TRUE(holds.has_value());
            ASSERT_EQ(*holds, reached) << phi.to_string() << "\n" << format_input(in);
            any = any || reached;
            std::size_t d = 0;
            while (d < values.size() && values[d] == 4) {
                values[d++] = -4;
            }
            if (d == values.size()) {
                break;
            }
            ++values[d];
        }
        reachable_programs += any;
    }
    EXPECT_GT(reachable_programs, cases / 4);
}

// Every sequence of at most five loop iterations, each along one backbone of
// the induced flowgraph, that can actually execute from the entry values.
TEST(EngineProperties, IteratedStateAndLoopingConditionHoldOnFeasibleIterations) {
    Rng rng(0xE0E0'0002);
    int feasible = 0;
    int nontrivial = 0;
    for (int c = 0; c < cases; ++c) {
        const Flowgraph fg = testing::random_single_loop(rng);
        Engine engine;
        engine.necessary_condition(fg);
        ASSERT_EQ(engine.summaries().size(), 1u);
        const LoopSummary& s = engine.summaries().begin()->second;
        ASSERT_EQ(s.counters.size(), s.backbones.size());

        // Zero iterations: identity state and a condition that holds.
        Substitution zero;
        for (const auto& k : s.counters) {
            zero.emplace(SubstKey::of(k), Expr::integer(0));
        }
        for (const auto& [v, e] : s.iterated_state.values()) {
            if (!contains_star(e)) {
                EXPECT_EQ(substitute(e, zero), Expr::symbol(v));
            }
        }

        for (int sample = 0; sample < 3; ++sample) {
            const ConcreteInput entry = random_loop_input(rng);
            std::vector<std::size_t> seq;
            std::function<void()> visit = [&] {
                Valuation val = valuation_of(entry);
                bool ok = true;
                for (auto idx : seq) {
                    Path p = s.backbones[idx];
                    p.back() = s.entry;
                    if (!testing::run_path(fg, p, val)) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) {
                    return;
                }
                Valuation sym = valuation_of(entry);
                for (std::size_t i = 0; i < s.counters.size(); ++i) {
                    sym.counters[s.counters[i]] = static_cast<Int>(std::count(seq.begin(), seq.end(), i));
                }
                for (const auto& [v, e] : s.iterated_state.values()) {
                    if (!contains_star(e)) {
                        EXPECT_EQ(eval_concrete(e, sym), val.symbols.at(v))
                            << v << " = " << e.to_string() << " after " << seq.size() << " iterations";
                    }
                }
                EXPECT_EQ(eval_concrete(s.looping_condition, sym), std::optional<bool>(true))
                    << s.looping_condition.to_string();
                ++feasible;
                nontrivial += !seq.empty();
                if (seq.size() < 5) {
                    for (std::size_t i = 0; i < s.backbones.size(); ++i) {
                        seq.push_back(i);
                        visit();
                        seq.pop_back();
                    }
                }
            };
            visit();
        }
    }
    EXPECT_GE(nontrivial, cases);
    EXPECT_GE(feasible, cases);
}

TEST(EngineProperties, ReachingInputsSatisfyNecessaryCondition) {
    Rng rng(0xE0E0'0003);
    int reaching = 0;
    int programs = 0;
    for (int attempt = 0; reaching < cases && attempt < 50 * cases; ++attempt) {
        const Flowgraph fg = testing::random_single_loop(rng);
        const Formula phi = necessary_condition(fg);
        ++programs;
        for (int sample = 0; sample < 6; ++sample) {
            const ConcreteInput in = random_loop_input(rng);
            const Trace t = concrete_run(fg, in, 300);
            if (!t.reached_target) {
                continue;
            }
            Valuation v = valuation_of(in);
            v.existential_limit = 40;
            EXPECT_EQ(eval_concrete(phi, v), std::optional<bool>(true)) << phi.to_string() << "\n"
                                                                        << format_input(in);
            ++reaching;
        }
    }
    EXPECT_GE(reaching, cases);
}

TEST(EngineProperties, RunningExampleReachingInputsSatisfyNecessaryCondition) {
    Rng rng(0xE0E0'0004);
    const Flowgraph fg = testing::corpus("running_example");
    const Formula phi = necessary_condition(fg);
    int reaching = 0;
    for (int attempt = 0; reaching < cases && attempt < 50 * cases; ++attempt) {
        ConcreteInput in;
        in.scalars["n"] = uniform(rng, 14, 20);
        ArrayValue a;
        a.default_value = uniform(rng, 0, 1);
        for (Int i = 0; i <= 20; ++i) {
            a.cells[{i}] = coin(rng, 0.85) ? 1 : uniform(rng, -1, 3);
        }
        in.arrays["A"] = a;
        if (!concrete_run(fg, in).reached_target) {
            continue;
        }
        Valuation v = valuation_of(in);
        v.existential_limit = 20;
        EXPECT_EQ(eval_concrete(phi, v), std::optional<bool>(true)) << format_input(in);
        ++reaching;
    }
    EXPECT_GE(reaching, cases);
}

}  // namespace
}  // namespace apc
