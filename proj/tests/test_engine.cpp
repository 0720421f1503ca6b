// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <chrono>

#include "apc/engine.hpp"
#include "apc/eval.hpp"
#include "running_example.hpp"

namespace apc {
namespace {

using testing::lit;

Expr sym(const std::string& s) { return Expr::symbol(s); }

TEST(Engine, RunningExampleFormulas) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto check = testing::check_running_example();
    const auto elapsed = std::chrono::steady_clock::now() - t0;
    for (const auto& f : check.failures) {
        ADD_FAILURE() << f;
    }
    EXPECT_LT(elapsed, std::chrono::seconds(1));
}

TEST(Engine, RunningExampleBackboneState) {
    const Flowgraph fg = testing::corpus("running_example");
    Engine engine;
    engine.necessary_condition(fg);
    ASSERT_EQ(engine.last_results().size(), 1u);
    const auto& r = engine.last_results()[0];
    const auto& counters = engine.summaries().begin()->second.counters;
    const Expr k1 = Expr::counter(counters[0]);
    const Expr k2 = Expr::counter(counters[1]);
    EXPECT_EQ(r.state.at("i"), k1 + k2 + lit(3));
    EXPECT_EQ(r.state.at("k"), k1);
    EXPECT_EQ(r.backbone, (Path{"a", "b", "c", "g", "h"}));
}

TEST(Engine, LoopFreeSingleEdge) {
    const Flowgraph fg = parse_flowgraph("var x : int\nnode s start\nnode t target\nedge s -> t : assume x > 0\n");
    Engine engine;
    EXPECT_EQ(engine.necessary_condition(fg), Formula::cmp(CmpOp::Gt, sym("x"), lit(0)));
    EXPECT_EQ(engine.last_results().at(0).state, SymbolicState::identity({"x"}));
}

TEST(Engine, LoopFreeIsDisjunctionOfPathConditions) {
    const Flowgraph fg = parse_flowgraph(R"(
var x, y : int
node s start
node t target
edge s -> a : assume x > 0
edge s -> b : assume !(x > 0)
edge a -> t : assume y == x
edge b -> c : y := y + 1
edge c -> t : assume y < 0
)");
    const Formula expected = (Formula::cmp(CmpOp::Gt, sym("x"), lit(0)) && Formula::cmp(CmpOp::Eq, sym("y"), sym("x"))) ||
                             (Formula::cmp(CmpOp::Le, sym("x"), lit(0)) &&
                              Formula::cmp(CmpOp::Lt, sym("y") + lit(1), lit(0)));
    EXPECT_EQ(testing::canonical_text(necessary_condition(fg)), testing::canonical_text(expected));
}

TEST(Engine, UnreachableTargetGivesFalse) {
    const Flowgraph fg = parse_flowgraph("node s start\nnode t target\nedge t -> s : skip\n");
    EXPECT_TRUE(necessary_condition(fg).is_false());
}

TEST(Engine, SquaringLoopDropsLaterTest) {
    const Flowgraph fg = parse_flowgraph(R"(
var i, n, x : int
node s start
node t target
edge s -> h : i := 0
edge h -> b : assume i < n
edge h -> e : assume !(i < n)
edge b -> c : x := x * x
edge c -> h : i := i + 1
edge e -> t : assume x > 3
)");
    Engine engine;
    const Formula phi = engine.necessary_condition(fg);
    EXPECT_FALSE(symbols_of(phi).contains("x")) << phi.to_string();
    EXPECT_FALSE(contains_star(phi));
    const auto& s = engine.summaries().begin()->second;
    EXPECT_TRUE(s.iterated_state.at("x").is_star());
    EXPECT_EQ(s.iterated_state.at("i"), Expr::counter(s.counters[0]) + sym("i"));
}

TEST(Engine, SingleBackboneCountingLoop) {
    const Flowgraph fg = parse_flowgraph(R"(
var i, n : int
node s start
node t target
edge s -> h : skip
edge h -> b : assume i < n
edge b -> h : i := i + 1
edge h -> t : assume !(i < n)
)");
    Engine engine;
    engine.necessary_condition(fg);
    const auto& s = engine.summaries().begin()->second;
    ASSERT_EQ(s.counters.size(), 1u);
    EXPECT_EQ(s.iterated_state.at("i"), Expr::counter(s.counters[0]) + sym("i"));
    EXPECT_EQ(s.iterated_state.at("n"), sym("n"));
    // c concrete iterations from i = 2 with n = 9.
    for (Int c = 0; c <= 5; ++c) {
        Valuation v;
        v.symbols = {{"i", 2}, {"n", 9}};
        v.counters[s.counters[0]] = c;
        EXPECT_EQ(eval_concrete(s.iterated_state.at("i"), v), 2 + c);
        EXPECT_EQ(eval_concrete(s.looping_condition, v), true);
    }
}

TEST(Engine, NonMonotoneLoopDegeneratesToTrue) {
    const Flowgraph fg = testing::corpus("incompleteness");
    Engine engine;
    EXPECT_TRUE(engine.necessary_condition(fg).is_true());
    EXPECT_TRUE(engine.summaries().begin()->second.iterated_state.at("i").is_star());
}

TEST(Engine, StarOnlyBackboneGivesTrivialLoopingCondition) {
    const Flowgraph fg = parse_flowgraph(R"(
var y : int
node s start
node t target
edge s -> h : skip
edge h -> b : assume y < 5
edge b -> h : y := 2 * y
edge h -> t : assume !(y < 5)
)");
    Engine engine;
    engine.necessary_condition(fg);
    const auto& s = engine.summaries().begin()->second;
    EXPECT_FALSE(contains_star(s.looping_condition));
    Valuation v;
    v.symbols["y"] = 1;
    for (Int c = 0; c < 4; ++c) {
        v.counters[s.counters[0]] = c;
        EXPECT_EQ(eval_concrete(s.looping_condition, v), true);
    }
}

TEST(ImprovedValue, BuiltInCases) {
    const std::vector<Counter> ks{{CounterKind::Kappa, 1, 0}, {CounterKind::Kappa, 2, 0}};
    const SymbolicState current = SymbolicState::unknown({"i", "n", "x"});
    SymbolicState b1 = SymbolicState::identity({"i", "n", "x"});
    b1.set("i", sym("i") + lit(1));
    b1.set("x", lit(2) * sym("x"));
    SymbolicState b2 = b1;
    const std::vector<SymbolicState> per{b1, b2};
    EXPECT_EQ(improved_value("i", per, current, ks), sym("i") + Expr::counter(ks[0]) + Expr::counter(ks[1]));
    EXPECT_EQ(improved_value("n", per, current, ks), sym("n"));
    EXPECT_TRUE(improved_value("x", per, current, ks).is_star());

    // The increment may depend on a loop-invariant variable, but not on one
    // the loop changes.
    SymbolicState c1 = SymbolicState::identity({"i", "n"});
    c1.set("i", sym("i") + sym("n"));
    SymbolicState settled = SymbolicState::unknown({"i", "n"});
    settled.set("n", sym("n"));
    EXPECT_EQ(improved_value("i", {c1}, settled, {ks[0]}), sym("i") + sym("n") * Expr::counter(ks[0]));
    EXPECT_TRUE(improved_value("i", {c1}, SymbolicState::unknown({"i", "n"}), {ks[0]}).is_star());
}

TEST(ImprovedValue, ExtraRuleIsConsulted) {
    const std::vector<Counter> ks{{CounterKind::Kappa, 1, 0}};
    SymbolicState b = SymbolicState::identity({"x"});
    b.set("x", lit(2) * sym("x"));
    const ImprovedValueRule rule = [](const std::string& v, const std::vector<SymbolicState>&, const SymbolicState&,
                                      const std::vector<Counter>&) -> std::optional<Expr> {
        return v == "x" ? std::optional<Expr>(Expr::symbol("x")) : std::nullopt;
    };
    EXPECT_TRUE(improved_value("x", {b}, SymbolicState::unknown({"x"}), ks).is_star());
    EXPECT_EQ(improved_value("x", {b}, SymbolicState::unknown({"x"}), ks, {rule}), sym("x"));
}

TEST(Engine, NestedLoopsAreSummarized) {
    const Flowgraph fg = testing::corpus("matrir");
    Engine engine;
    const Formula phi = engine.necessary_condition(fg);
    EXPECT_EQ(engine.summaries().size(), 2u);
    EXPECT_TRUE(has_quantifiers(phi));
    EXPECT_FALSE(contains_star(phi));
}

TEST(Engine, BackboneCapIsEnforced) {
    EngineOptions o;
    o.max_backbones = 1;
    const Flowgraph fg = parse_flowgraph(R"(
var x : int
node s start
node t target
edge s -> a : assume x > 0
edge s -> b : assume !(x > 0)
edge a -> t : skip
edge b -> t : skip
)");
    EXPECT_THROW(necessary_condition(fg, o), CapExceeded);
}

}  // namespace
}  // namespace apc
