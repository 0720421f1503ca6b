// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "apc/engine.hpp"
#include "apc/eval.hpp"
#include "apc/qelim.hpp"
#include "apc/sexpr.hpp"
#include "apc/smt.hpp"
#include "apc/state.hpp"
#include "support.hpp"

namespace apc {
namespace {

using testing::coin;
using testing::Rng;
using testing::uniform;

constexpr int cases = 200;
const std::vector<std::string> names{"a", "b", "c"};
const Counter k1{CounterKind::Kappa, 1, 0};
const Counter t2{CounterKind::Tau, 2, 0};

/// A term independent of Expr, evaluated by plain integer arithmetic.
struct Term {
    enum Kind { Lit, Sym, Kappa, Tau, Star, Add, Sub, Mul, Neg, Div, Mod, Read } kind;
    Int value = 0;
    std::string name;
    std::vector<Term> kids;
};

Term random_term(Rng& rng, int depth, bool allow_star = false) {
    if (depth == 0 || coin(rng, 0.3)) {
        switch (uniform(rng, 0, allow_star ? 4 : 3)) {
        case 0: return {Term::Lit, uniform(rng, -4, 4), {}, {}};
        case 1: return {Term::Kappa, 0, {}, {}};
        case 2: return {Term::Tau, 0, {}, {}};
        case 3: return {Term::Sym, 0, testing::pick(rng, names), {}};
        default: return {Term::Star, 0, {}, {}};
        }
    }
    const auto kind = static_cast<Term::Kind>(uniform(rng, Term::Add, Term::Read));
    const int arity = kind == Term::Neg || kind == Term::Read ? 1 : 2;
    Term t{kind, 0, {}, {}};
    for (int i = 0; i < arity; ++i) {
        t.kids.push_back(random_term(rng, depth - 1, allow_star));
    }
    return t;
}

struct Env {
    std::map<std::string, Int> symbols;
    Int kappa = 0;
    Int tau = 0;
    Int star = 0;
};

std::optional<Int> floor_div(Int a, Int b) {
    if (b == 0) {
        return std::nullopt;
    }
    Int r = a % b;
    if (r < 0) {
        r += b < 0 ? -b : b;
    }
    return (a - r) / b;
}

Int table(Int i) { return i < -50 || i > 50 ? 0 : (i * 7 + 3) % 5; }

const ArrayValue& table_value() {
    static const ArrayValue t = [] {
        ArrayValue a;
        for (Int i = -50; i <= 50; ++i) {
            a.cells[{i}] = table(i);
        }
        return a;
    }();
    return t;
}

std::optional<Int> reference(const Term& t, const Env& env) {
    std::vector<Int> v;
    for (const auto& k : t.kids) {
        auto r = reference(k, env);
        if (!r) {
            return std::nullopt;
        }
        v.push_back(*r);
    }
    switch (t.kind) {
    case Term::Lit: return t.value;
    case Term::Sym: return env.symbols.at(t.name);
    case Term::Kappa: return env.kappa;
    case Term::Tau: return env.tau;
    case Term::Star: return env.star;
    case Term::Add: return v[0] + v[1];
    case Term::Sub: return v[0] - v[1];
    case Term::Mul: return v[0] * v[1];
    case Term::Neg: return -v[0];
    case Term::Div: return floor_div(v[0], v[1]);
    case Term::Mod: {
        auto q = floor_div(v[0], v[1]);
        return q ? std::optional<Int>(v[0] - *q * v[1]) : std::nullopt;
    }
    case Term::Read: return table(v[0]);
    }
    return std::nullopt;
}

/// Builds the term as an Expr; ★ leaves become `star` (★ itself or a literal).
Expr build(const Term& t, const Expr& star) {
    std::vector<Expr> v;
    for (const auto& k : t.kids) {
        v.push_back(build(k, star));
    }
    switch (t.kind) {
    case Term::Lit: return Expr::integer(t.value);
    case Term::Sym: return Expr::symbol(t.name);
    case Term::Kappa: return Expr::counter(k1);
    case Term::Tau: return Expr::counter(t2);
    case Term::Star: return star;
    case Term::Add: return v[0] + v[1];
    case Term::Sub: return v[0] - v[1];
    case Term::Mul: return v[0] * v[1];
    case Term::Neg: return -v[0];
    case Term::Div: return div(v[0], v[1]);
    case Term::Mod: return mod(v[0], v[1]);
    case Term::Read: return Expr::apply("T", {v[0]});
    }
    return {};
}

Valuation valuation(const Env& env) {
    Valuation val;
    val.symbols = env.symbols;
    val.counters[k1] = env.kappa;
    val.counters[t2] = env.tau;
    val.arrays["T"] = table_value();
    return val;
}

Env random_env(Rng& rng) {
    Env env;
    for (const auto& n : names) {
        env.symbols[n] = uniform(rng, -5, 5);
    }
    env.kappa = uniform(rng, 0, 6);
    env.tau = uniform(rng, 0, 6);
    env.star = uniform(rng, -5, 5);
    return env;
}

TEST(AlgebraProperties, NormalizationPreservesValue) {
    Rng rng(0xA1A1'0001);
    int defined = 0;
    for (int c = 0; c < cases; ++c) {
        const Term t = random_term(rng, 4);
        const Expr e = build(t, Expr::star());
        EXPECT_EQ(Polynomial::of(e).to_expr(), e);
        for (int s = 0; s < 5; ++s) {
            const Env env = random_env(rng);
            const auto want = reference(t, env);
            const auto got = eval_concrete(e, valuation(env));
            if (want) {
                EXPECT_EQ(got, want) << e.to_string();
                ++defined;
            }
        }
    }
    EXPECT_GE(defined, cases);
}

TEST(AlgebraProperties, CanonicalFormsIdentifyEqualSums) {
    Rng rng(0xA1A1'0002);
    for (int c = 0; c < cases; ++c) {
        const Expr a = build(random_term(rng, 3), Expr::star());
        const Expr b = build(random_term(rng, 3), Expr::star());
        const Expr d = build(random_term(rng, 3), Expr::star());
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ((a + b) + d, a + (b + d));
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(a + Expr::integer(0), a);
        EXPECT_EQ(a - a, Expr::integer(0));
        EXPECT_EQ(-(-a), a);
        EXPECT_EQ((a + b) - b, a);
    }
}

TEST(AlgebraProperties, SubstitutionCommutesWithEvaluation) {
    Rng rng(0xA1A1'0003);
    int checked = 0;
    for (int c = 0; c < cases; ++c) {
        const Term t = random_term(rng, 4);
        const Term f = random_term(rng, 2);
        const Term g = random_term(rng, 2);
        const Expr e = build(t, Expr::star());
        const Substitution sub{{SubstKey::of_symbol("a"), build(f, Expr::star())},
                               {SubstKey::of(k1), build(g, Expr::star())}};
        const Expr replaced = substitute(e, sub);
        for (int s = 0; s < 5; ++s) {
            Env env = random_env(rng);
            const auto fv = reference(f, env);
            const auto gv = reference(g, env);
            if (!fv || !gv) {
                continue;
            }
            Env inner = env;
            inner.symbols["a"] = *fv;
            inner.kappa = *gv;
            const auto want = reference(t, inner);
            if (!want) {
                continue;
            }
            EXPECT_EQ(eval_concrete(replaced, valuation(env)), want) << e.to_string() << " => " << replaced.to_string();
            ++checked;
        }
    }
    EXPECT_GE(checked, cases);
}

TEST(AlgebraProperties, ComposeIsSequentialExecution) {
    Rng rng(0xA1A1'0004);
    int checked = 0;
    for (int c = 0; c < cases; ++c) {
        std::map<std::string, Term> first;
        std::map<std::string, Term> second;
        SymbolicState s1;
        SymbolicState s2;
        for (const auto& n : names) {
            first[n] = random_term(rng, 2);
            second[n] = random_term(rng, 2);
            s1.set(n, build(first[n], Expr::star()));
            s2.set(n, build(second[n], Expr::star()));
        }
        const SymbolicState both = compose_states(s1, s2);
        for (int s = 0; s < 5; ++s) {
            const Env env = random_env(rng);
            Env mid = env;
            bool ok = true;
            for (const auto& n : names) {
                const auto v = reference(first[n], env);
                ok = ok && v.has_value();
                if (v) {
                    mid.symbols[n] = *v;
                }
            }
            if (!ok) {
                continue;
            }
            for (const auto& n : names) {
                const auto want = reference(second[n], mid);
                if (want) {
                    EXPECT_EQ(eval_concrete(both.at(n), valuation(env)), want) << n;
                    ++checked;
                }
            }
        }
    }
    EXPECT_GE(checked, cases);
}

/// All randomness comes from `rng`, so two calls with equal generators build
/// the same shape whatever `star` is.
Formula random_formula(Rng& rng, const Expr& star, int depth = 3) {
    static const std::vector<CmpOp> ops{CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge};
    if (depth == 0 || coin(rng, 0.4)) {
        const CmpOp op = testing::pick(rng, ops);
        const Term l = random_term(rng, 2, true);
        const Term r = random_term(rng, 2, true);
        return Formula::cmp(op, build(l, star), build(r, star));
    }
    const auto kind = uniform(rng, 0, 3);
    const Formula a = random_formula(rng, star, depth - 1);
    const Formula b = random_formula(rng, star, depth - 1);
    switch (kind) {
    case 0: return a && b;
    case 1: return a || b;
    case 2: return Formula::negation(a);
    default: return Formula::implies(a, b);
    }
}

TEST(AlgebraProperties, DroppingStarPredicatesWeakens) {
    Rng rng(0xA1A1'0005);
    int premises = 0;
    for (int c = 0; c < cases; ++c) {
        const std::uint64_t seed = rng();
        Rng first(seed);
        const Formula with_star = random_formula(first, Expr::star());
        const Formula weakened = drop_star_predicates(with_star);
        EXPECT_FALSE(contains_star(weakened));
        for (int s = 0; s < 5; ++s) {
            const Env env = random_env(rng);
            Rng again(seed);
            const Formula concrete = random_formula(again, Expr::integer(env.star));
            const auto holds = eval_concrete(concrete, valuation(env));
            if (holds == std::optional<bool>(true)) {
                EXPECT_NE(eval_concrete(weakened, valuation(env)), std::optional<bool>(false))
                    << with_star.to_string() << " => " << weakened.to_string();
                ++premises;
            }
        }
    }
    EXPECT_GE(premises, cases);
}

std::set<std::string> declared(const std::string& script) {
    std::set<std::string> out;
    for (const auto& s : parse_sexprs(script)) {
        if (s.is_list && s.items.size() >= 2 &&
            (s.items[0].is_atom("declare-const") || s.items[0].is_atom("declare-fun"))) {
            out.insert(s.items[1].atom);
        }
    }
    return out;
}

std::set<std::string> expected_declarations(const Formula& f) {
    std::set<std::string> out;
    for (const auto& s : symbols_of(f)) {
        out.insert(smt_symbol(s));
    }
    for (const auto& [fn, _] : functions_of(f)) {
        out.insert(smt_symbol(fn));
    }
    for (const auto& c : free_counters(f)) {
        out.insert(c.smt_name());
    }
    return out;
}

TEST(AlgebraProperties, EmittedDeclarationsAreTheFreeSymbols) {
    Rng rng(0xA1A1'0006);
    for (int c = 0; c < cases; ++c) {
        const Flowgraph fg = coin(rng) ? testing::random_single_loop(rng) : testing::random_loop_free(rng);
        const Formula phi = necessary_condition(fg);
        EXPECT_EQ(declared(emit_smtlib(phi)), expected_declarations(phi));
        const KBoundedFormula kb = k_bound_transform(phi, uniform(rng, 0, 3));
        EXPECT_EQ(declared(emit_smtlib(kb)), expected_declarations(kb.formula));

        const Formula random = random_formula(rng, Expr::integer(0));
        EXPECT_EQ(declared(emit_smtlib(random)), expected_declarations(random)) << random.to_string();
    }
}

}  // namespace
}  // namespace apc
