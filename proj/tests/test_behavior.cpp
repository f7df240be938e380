#include <gtest/gtest.h>

#include "oracles.hpp"
#include "orthobox/behavior.hpp"
#include "orthobox/simplex.hpp"

using namespace orthobox;

namespace {

OrthoGraph triangle_graph() { return OrthoGraph::from_edges({"A", "B", "C"}, {{0, 1}, {1, 2}, {0, 2}}); }

OrthoGraph pentagon() { return OrthoGraph::from_edges({"1", "2", "3", "4", "5"}, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}}); }

MarginalVector flat(std::size_t n, Rational p) { return MarginalVector(std::vector<Rational>(n, p)); }

/// Checks whichever certificate came back against its defining inequalities.
void expect_certificate_sound(const OrthoGraph& g, const MarginalVector& p, const FeasibilityCertificate& cert) {
    if (cert.feasible) {
        Rational total = 0;
        for (const auto& [assignment, mass] : cert.distribution) {
            EXPECT_TRUE(g.is_independent(assignment));
            EXPECT_GT(mass, 0);
            total += mass;
        }
        EXPECT_EQ(total, 1);
        EXPECT_EQ(cert.reproduced_marginals(g.size()), p.values());
    } else {
        ASSERT_EQ(cert.weights.size(), g.size());
        for (PropSet a : oracle::independent_sets(g)) {
            Rational lhs = 0;
            for (std::size_t v = 0; v < g.size(); ++v) {
                if ((a >> v) & 1U) lhs += cert.weights[v];
            }
            EXPECT_LE(lhs, cert.bound);
        }
        Rational value = 0;
        for (std::size_t v = 0; v < g.size(); ++v) value += cert.weights[v] * p[v];
        EXPECT_GT(value, cert.bound);
    }
}

}  // namespace

TEST(Simplex, FeasibleSystem) {
    const std::vector<std::vector<Rational>> a{{1, 1, 0}, {0, 1, 1}};
    const std::vector<Rational> b{Rational(1), Rational(1, 2)};
    const auto r = solve_feasibility(a, b);
    ASSERT_TRUE(r.feasible);
    for (std::size_t i = 0; i < 2; ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < 3; ++j) s += a[i][j] * r.point[j];
        EXPECT_EQ(s, b[i]);
    }
    for (const auto& x : r.point) EXPECT_GE(x, 0);
}

TEST(Simplex, InfeasibleSystemHasFarkasVector) {
    // x1 + x2 = 1 and x1 + x2 = 2 cannot both hold.
    const std::vector<std::vector<Rational>> a{{1, 1}, {1, 1}};
    const std::vector<Rational> b{Rational(1), Rational(2)};
    const auto r = solve_feasibility(a, b);
    ASSERT_FALSE(r.feasible);
    for (std::size_t j = 0; j < 2; ++j) EXPECT_LE(r.farkas[0] * a[0][j] + r.farkas[1] * a[1][j], 0);
    EXPECT_GT(r.farkas[0] * b[0] + r.farkas[1] * b[1], 0);
}

TEST(Simplex, NegativeRightHandSide) {
    const std::vector<std::vector<Rational>> a{{-1, 1}};
    const std::vector<Rational> b{Rational(-3)};
    const auto r = solve_feasibility(a, b);
    ASSERT_TRUE(r.feasible);
    EXPECT_EQ(-r.point[0] + r.point[1], -3);
}

TEST(Exclusivity, TriangleAtOneHalf) {
    const auto c = check_exclusivity(flat(3, Rational(1, 2)), triangle_graph());
    EXPECT_FALSE(c.holds);
    ASSERT_TRUE(c.violating_clique.has_value());
    EXPECT_EQ(*c.violating_clique, PropSet{7});
    EXPECT_EQ(c.clique_sum, Rational(3, 2));
}

TEST(Exclusivity, HoldsAtOneThird) {
    const auto c = check_exclusivity(flat(3, Rational(1, 3)), triangle_graph());
    EXPECT_TRUE(c.holds);
    EXPECT_EQ(c.clique_sum, 1);
}

TEST(Feasibility, TriangleFlatHalfIsInfeasible) {
    const auto g = triangle_graph();
    const auto p = flat(3, Rational(1, 2));
    const auto cert = joint_feasibility(g, p);
    EXPECT_FALSE(cert.feasible);
    EXPECT_FALSE(oracle::feasible(g, p.values()));
    EXPECT_EQ(admissible_assignments(g).size(), 4U);
    expect_certificate_sound(g, p, cert);
}

TEST(Feasibility, TriangleAtOneThirdIsFeasible) {
    const auto g = triangle_graph();
    const auto p = flat(3, Rational(1, 3));
    const auto cert = joint_feasibility(g, p);
    EXPECT_TRUE(cert.feasible);
    expect_certificate_sound(g, p, cert);
}

TEST(Feasibility, PentagonSeparatesExclusivityFromFeasibility) {
    // Every edge sums to 1, yet no stable set holds more than two of the five.
    const auto g = pentagon();
    const auto p = flat(5, Rational(1, 2));
    EXPECT_TRUE(check_exclusivity(p, g).holds);
    const auto cert = joint_feasibility(g, p);
    EXPECT_FALSE(cert.feasible);
    EXPECT_FALSE(oracle::feasible(g, p.values()));
    expect_certificate_sound(g, p, cert);

    const auto q = flat(5, Rational(2, 5));
    EXPECT_TRUE(joint_feasibility(g, q).feasible);
}

TEST(Feasibility, AgreesWithBruteForceOnRandomGraphs) {
    oracle::SplitMix rng(5);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 250; ++trial) {
        const std::size_t n = 3 + rng.below(3);
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (rng.below(3) != 0) edges.emplace_back(i, j);
            }
        }
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + i)));
        const auto g = OrthoGraph::from_edges(labels, edges);
        std::vector<Rational> values;
        for (std::size_t i = 0; i < n; ++i) values.emplace_back(static_cast<long>(rng.below(7)), 6);
        const MarginalVector p(values);

        const auto cert = joint_feasibility(g, p);
        EXPECT_EQ(cert.feasible, oracle::feasible(g, values)) << "trial " << trial;
        expect_certificate_sound(g, p, cert);
        (cert.feasible ? feasible : infeasible)++;
    }
    EXPECT_GT(feasible, 20);
    EXPECT_GT(infeasible, 20);
}

TEST(Feasibility, SmallGraphsNeedOnlyCliqueConstraints) {
    // Graphs on at most four vertices are perfect, so exclusivity decides feasibility.
    oracle::SplitMix rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) {
                if (rng.below(2)) edges.emplace_back(i, j);
            }
        }
        const auto g = OrthoGraph::from_edges({"a", "b", "c", "d"}, edges);
        std::vector<Rational> values;
        for (int i = 0; i < 4; ++i) values.emplace_back(static_cast<long>(rng.below(5)), 4);
        const MarginalVector p(values);
        EXPECT_EQ(joint_feasibility(g, p).feasible, check_exclusivity(p, g).holds) << "trial " << trial;
    }
}

TEST(Feasibility, SizeMismatchThrows) {
    EXPECT_THROW(joint_feasibility(triangle_graph(), flat(2, Rational(1, 2))), PreconditionError);
}

TEST(Behavior, TableValidation) {
    const std::vector<int> pm{1, -1};
    std::vector<Rational> probs(16, Rational(1, 4));
    EXPECT_NO_THROW(BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, probs));
    probs[0] = Rational(1, 2);
    EXPECT_THROW(BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, probs), PreconditionError);
    EXPECT_THROW(BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, std::vector<Rational>(15, Rational(0))),
                 PreconditionError);
}

TEST(Behavior, EightDistinctPrBoxes) {
    const auto boxes = enumerate_pr_boxes();
    ASSERT_EQ(boxes.size(), 8U);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        EXPECT_TRUE(is_pr_box(boxes[i]));
        EXPECT_TRUE(no_signalling_check(boxes[i]).holds);
        for (std::size_t j = 0; j < i; ++j) EXPECT_NE(boxes[i].probabilities(), boxes[j].probabilities());
        EXPECT_EQ(chsh(boxes[i]).s, 4);
    }
}

TEST(Behavior, StandardPrBoxHasSFour) {
    const auto box = pr_box({1, 1, 1, -1});
    const auto v = chsh(box);
    EXPECT_EQ(v.s, 4);
    EXPECT_EQ(v.correlators[3], -1);
}

TEST(Behavior, PrBoxRequiresOddAnticorrelations) {
    EXPECT_THROW(pr_box({1, 1, 1, 1}), PreconditionError);
    EXPECT_THROW(pr_box({1, 1, 0, -1}), PreconditionError);
}

TEST(Behavior, SignallingTableIsDetected) {
    // Bob's outcome copies Alice's setting.
    const std::vector<int> pm{1, -1};
    std::vector<Rational> probs;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) probs.push_back(b == x ? Rational(1, 2) : Rational(0));
            }
        }
    }
    const BehaviorTable t({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, probs);
    const auto check = no_signalling_check(t);
    EXPECT_FALSE(check.holds);
    ASSERT_TRUE(check.witness.has_value());
    EXPECT_EQ(check.witness->party, 1U);
    EXPECT_FALSE(is_pr_box(t));
}

TEST(Behavior, ClassicalBoxStaysBelowTwo) {
    // Deterministic outcomes a = +1, b = +1 for every setting.
    const std::vector<int> pm{1, -1};
    std::vector<Rational> probs;
    for (int k = 0; k < 4; ++k) {
        for (std::size_t o = 0; o < 4; ++o) probs.push_back(o == 0 ? Rational(1) : Rational(0));
    }
    const BehaviorTable t({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, probs);
    EXPECT_EQ(chsh(t).s, 2);
    EXPECT_TRUE(no_signalling_check(t).holds);
}

TEST(Behavior, OutcomeOrderDoesNotMatterForPrMembership) {
    const std::vector<int> mp{-1, 1};
    const auto box = pr_box({1, 1, 1, -1});
    std::vector<Rational> probs;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            for (std::size_t a = 0; a < 2; ++a) {
                for (std::size_t b = 0; b < 2; ++b) probs.push_back(box.p(x, y, 1 - a, 1 - b));
            }
        }
    }
    EXPECT_TRUE(is_pr_box(BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {mp, mp}, probs)));
}
