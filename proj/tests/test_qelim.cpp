// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "apc/engine.hpp"
#include "apc/eval.hpp"
#include "apc/qelim.hpp"
#include "support.hpp"

namespace apc {
namespace {

using testing::lit;

const Counter k1{CounterKind::Kappa, 1, 0};
const Counter t1 = k1.as_tau();

Formula rho(const Expr& t) { return Formula::cmp(CmpOp::Eq, Expr::apply("A", {t}), lit(1)); }

Formula universal() {
    return Formula::forall({BoundVar{t1, lit(0), Expr::counter(k1), false}}, rho(Expr::counter(t1)));
}

TEST(KBound, ExpandsUniversalIntoInstances) {
    const KBoundedFormula kb = k_bound_transform(universal(), 2);
    std::vector<Formula> parts;
    for (Int c = 0; c <= 2; ++c) {
        parts.push_back(Formula::implies(Formula::cmp(CmpOp::Lt, lit(c), Expr::counter(k1)), rho(lit(c))));
    }
    EXPECT_EQ(testing::canonical_text(kb.formula), testing::canonical_text(Formula::conj(parts)));
    EXPECT_EQ(kb.k, 2);
    EXPECT_TRUE(kb.freed.empty());
}

TEST(KBound, SmallestInstance) {
    const KBoundedFormula kb = k_bound_transform(universal(), 0);
    EXPECT_EQ(kb.formula, Formula::implies(Formula::cmp(CmpOp::Lt, lit(0), Expr::counter(k1)), rho(lit(0))));
}

TEST(KBound, FreesExistentialsWithBounds) {
    const Formula phi = Formula::exists({BoundVar{k1, lit(0), std::nullopt, false}},
                                        universal() && Formula::cmp(CmpOp::Gt, Expr::counter(k1), lit(12)));
    const KBoundedFormula kb = k_bound_transform(phi, 3);
    EXPECT_FALSE(has_quantifiers(kb.formula));
    ASSERT_EQ(kb.freed.size(), 1u);
    const Counter freed = *kb.freed.begin();
    EXPECT_EQ(freed.id, k1.id);
    EXPECT_NE(freed.instance, 0u);
    EXPECT_EQ(free_counters(kb.formula), kb.freed);
    // The range of the freed counter is kept.
    Valuation v;
    v.arrays["A"].default_value = 1;
    v.counters[freed] = -1;
    EXPECT_EQ(eval_concrete(kb.formula, v), false);
    v.counters[freed] = 13;
    EXPECT_EQ(eval_concrete(kb.formula, v), true);
}

TEST(KBound, RejectsNegativeUniversal) {
    EXPECT_THROW(k_bound_transform(Formula::negation(universal()), 2), UnsupportedQuantifier);
    EXPECT_THROW(k_bound_transform(Formula::implies(universal(), Formula::truth(false)), 2), UnsupportedQuantifier);
}

TEST(KBound, CorpusOutputIsQuantifierFree) {
    for (const auto& name : testing::corpus_names()) {
        const Formula phi = necessary_condition(testing::corpus(name));
        for (Int k : {0, 5, 25}) {
            const KBoundedFormula kb = k_bound_transform(phi, k);
            EXPECT_FALSE(has_quantifiers(kb.formula)) << name << " K=" << k;
            EXPECT_FALSE(contains_star(kb.formula)) << name;
            for (const auto& c : free_counters(kb.formula)) {
                EXPECT_TRUE(kb.freed.contains(c)) << name << " " << c.display();
            }
        }
    }
}

TEST(KBound, RunningExampleTruncationIsWeaker) {
    // n = 5 with A = 1 everywhere: no counter values up to 30 satisfy the
    // quantified condition, yet two instances of each universal leave room.
    const Formula phi = necessary_condition(testing::corpus("running_example"));
    Valuation v;
    v.symbols["n"] = 5;
    v.arrays["A"].default_value = 1;
    v.existential_limit = 30;
    EXPECT_EQ(eval_concrete(phi, v), false);
}

}  // namespace
}  // namespace apc
