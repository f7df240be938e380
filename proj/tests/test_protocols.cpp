#include <gtest/gtest.h>

#include "orthobox/protocols.hpp"

using namespace orthobox;

namespace {

struct Expected {
    const char* model;
    bool a, b, c;
};

void expect_verdict(const AssumptionVerdict& v, bool holds, const std::string& what) {
    EXPECT_EQ(v.holds, holds) << what << ": " << v.detail;
    EXPECT_FALSE(v.detail.empty()) << what;
    if (holds) {
        EXPECT_TRUE(v.witness_plan.empty()) << what;
    } else {
        EXPECT_FALSE(v.witness_plan.empty()) << what;
    }
}

Query q(Side s, const char* t) { return parse_query(s, t); }

}  // namespace

TEST(Assumptions, CanonicalMatrix) {
    const std::vector<Expected> table{{"seer", true, true, false}, {"firefly", true, false, true}, {"lsw", false, true, true}};
    for (const auto& e : table) {
        const auto r = assumption_report(make_model(e.model));
        expect_verdict(r.a, e.a, std::string(e.model) + " (a)");
        expect_verdict(r.b, e.b, std::string(e.model) + " (b)");
        expect_verdict(r.c, e.c, std::string(e.model) + " (c)");
    }
}

TEST(Assumptions, AnyInterleavingKeepsCanonicalVerdicts) {
    EXPECT_TRUE(test_assumption_a(make_model("seer"), CorrelationSchedule::any_interleaving).holds);
    EXPECT_TRUE(test_assumption_a(make_model("firefly"), CorrelationSchedule::any_interleaving).holds);
    EXPECT_FALSE(test_assumption_a(make_model("lsw"), CorrelationSchedule::any_interleaving).holds);
}

TEST(Assumptions, CuttingFlavors) {
    const auto local = assumption_report(make_model("firefly:alice_cuts_bob_local"));
    expect_verdict(local.a, false, "cut-local (a)");
    expect_verdict(local.b, true, "cut-local (b)");
    expect_verdict(local.c, true, "cut-local (c)");

    const auto mirror = assumption_report(make_model("firefly:alice_cuts_bob_mirror"));
    expect_verdict(mirror.b, true, "cut-mirror (b)");
    expect_verdict(mirror.c, false, "cut-mirror (c)");
    // With Alice's full procedure first, Bob's second reading can land on the
    // other half of a cut corner, so (a) fails.
    expect_verdict(mirror.a, false, "cut-mirror (a)");
    // Restricted to the fable's shape (Bob answers with a single query) the
    // correlation is perfect again.
    EXPECT_TRUE(test_assumption_a(make_model("firefly:alice_cuts_bob_mirror"), CorrelationSchedule::fable_shape).holds);
}

TEST(Assumptions, LswWitnessReplays) {
    // Alice reads A inside CA, Bob reads B and then A: the two A readings always differ.
    const auto m = make_model("lsw");
    EXPECT_EQ(test_assumption_a(m).witness_plan, "alice CA; bob B; bob A");
    Rational mismatch = 0;
    for (const auto& h : enumerate_histories(m, detail::linear_plan({q(Side::alice, "CA"), q(Side::bob, "B"), q(Side::bob, "A")}))) {
        if (h.steps[0].outcome[1] != h.steps[2].outcome[0]) mismatch += h.probability;
    }
    EXPECT_EQ(mismatch, 1);
}

TEST(Signalling, SeerLetsAliceSignal) {
    const auto report = detect_signalling(make_model("seer"));
    ASSERT_TRUE(report.signals);
    EXPECT_EQ(report.gap, Rational(1, 2));
    ASSERT_TRUE(report.strategy && report.bob_query && report.bob_outcome);
    const auto baseline = bob_marginal(make_model("seer"), std::nullopt, *report.bob_query);
    const auto moved = bob_marginal(make_model("seer"), report.strategy, *report.bob_query);
    EXPECT_EQ(baseline.p(*report.bob_outcome), report.baseline);
    EXPECT_EQ(moved.p(*report.bob_outcome), report.with_strategy);
    EXPECT_NE(report.baseline, report.with_strategy);
}

TEST(Signalling, FireflyAndLswDoNotSignal) {
    for (const char* name : {"firefly", "lsw", "firefly:alice_cuts_bob_local"}) {
        const auto report = detect_signalling(make_model(name));
        EXPECT_FALSE(report.signals) << name << ": " << report.describe();
        EXPECT_GT(report.combinations_checked, 0U);
    }
}

TEST(Signalling, BobMarginalWithoutAlice) {
    const auto m = bob_marginal(make_model("seer"), std::nullopt, q(Side::bob, "AB"));
    EXPECT_EQ(m.p_full(0), Rational(1, 2));
    EXPECT_EQ(m.p_full(1), Rational(1, 2));
    EXPECT_THROW(bob_marginal(make_model("seer"), std::nullopt, q(Side::alice, "AB")), PreconditionError);
}

TEST(Fable, DanielAlwaysRightSanduCoinFlip) {
    const auto stats = simulate_fable(20000, 5);
    EXPECT_EQ(stats.trials, 20000U);
    EXPECT_EQ(stats.daniel_successes, stats.trials);
    EXPECT_EQ(stats.sandu_second_successes, stats.trials);
    EXPECT_NEAR(stats.sandu_first_rate(), 0.5, 0.02);
    EXPECT_TRUE(stats.per_trial.empty());
}

TEST(Fable, SeededAndRecordable) {
    const auto a = simulate_fable(300, 17, true);
    const auto b = simulate_fable(300, 17, true);
    ASSERT_EQ(a.per_trial.size(), 300U);
    EXPECT_EQ(a.sandu_first_successes, b.sandu_first_successes);
    for (std::size_t i = 0; i < a.per_trial.size(); ++i) EXPECT_EQ(a.per_trial[i].sandu_first, b.per_trial[i].sandu_first);
    EXPECT_THROW(simulate_fable(0), PreconditionError);
}

TEST(Fable, PlanShape) {
    EXPECT_EQ(describe_plan(fable_plan(Box::A, Box::B)), "alice C {+: alice B | -: alice A}; bob AB");
    EXPECT_EQ(describe_plan(fable_plan(Box::A, Box::C)), "alice B {+: alice C | -: alice A}; bob CA");
}

TEST(PrBoxes, StandardInterpretationOnSeer) {
    const auto box = realize_pr_box(make_model("seer"), standard_interpretation());
    EXPECT_EQ(chsh(box).s, 4);
    EXPECT_TRUE(no_signalling_check(box).holds);
    EXPECT_TRUE(is_pr_box(box));
}

TEST(PrBoxes, EachAppearsTwicePerModel) {
    ASSERT_EQ(all_pair_interpretations().size(), 16U);
    for (const char* name : {"seer", "firefly", "lsw"}) {
        const auto sweep = sweep_pr_interpretations(make_model(name));
        ASSERT_EQ(sweep.boxes.size(), 16U) << name;
        for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(sweep.multiplicity[k], 2U) << name << " box " << k;
        for (const auto& box : sweep.boxes) {
            EXPECT_TRUE(no_signalling_check(box).holds) << name;
            EXPECT_EQ(chsh(box).s, 4) << name;
        }
    }
}

TEST(PrBoxes, SingleQueriesNeedSingleBoxes) {
    EXPECT_THROW(realize_pr_box(make_model("firefly"), single_query_interpretation()), InadmissibleQuery);
    const auto box = realize_pr_box(make_model("seer"), single_query_interpretation());
    EXPECT_TRUE(is_pr_box(box));
}

TEST(PrBoxes, ReadingsMustSitOnTheirSide) {
    auto interp = standard_interpretation();
    std::swap(interp.alice[0], interp.bob[0]);
    EXPECT_THROW(realize_pr_box(make_model("seer"), interp), PreconditionError);
}
