// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "orthobox/behavior.hpp"
#include "orthobox/protocols.hpp"
#include "orthobox/quantumref.hpp"
#include "orthobox/theorem.hpp"

using namespace orthobox;

namespace {

struct Verdict {
    bool pass = true;
    std::string note;
};

/// Collects failed checks; the first few are kept for the report line.
class Checks {
public:
    void require(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) first_ += (first_.empty() ? "" : "; ") + what;
    }
    bool ok() const { return failures_ == 0; }
    Verdict result(const std::string& summary) const {
        if (ok()) return {true, summary};
        return {false, std::to_string(failures_) + " failed check(s): " + first_};
    }

private:
    int failures_ = 0;
    std::string first_;
};

Plan linear(const std::vector<Query>& qs) {
    Plan p;
    for (const auto& q : qs) p.push_back(PlanStep{q, {}});
    return p;
}

Rational probability(const AnyModel& m, const Plan& plan, const std::function<bool(const History&)>& pred) {
    Rational total = 0;
    for (const auto& h : enumerate_histories(m, plan)) {
        if (pred(h)) total += h.probability;
    }
    return total;
}

std::vector<Query> pairs_on(Side s) {
    std::vector<Query> out;
    for (const char* t : {"AB", "BC", "CA"}) out.push_back(parse_query(s, t));
    return out;
}

// 1. Specker triple at p = 1/2.
Verdict specker_triple() {
    Checks c;
    const auto g = OrthoGraph::from_edges({"A", "B", "C"}, {{0, 1}, {1, 2}, {0, 2}});
    const MarginalVector p(std::vector<Rational>(3, Rational(1, 2)));
    const auto cert = joint_feasibility(g, p);
    c.require(!cert.feasible, "joint_feasibility reports feasible");
    const auto assignments = admissible_assignments(g);
    c.require(assignments.size() == 4, "expected 4 admissible assignments");
    // Every admissible assignment fills at most one box, so any mixture has marginal sum <= 1.
    for (PropSet a : assignments) c.require(cardinality(a) <= 1, "assignment with two full boxes");
    c.require(!oracle::feasible(g, p.values()), "brute-force oracle finds a distribution");
    const auto ex = check_exclusivity(p, g);
    c.require(!ex.holds && ex.clique_sum == Rational(3, 2), "exclusivity sum is not 3/2");
    return c.result("infeasible; oracle agrees over 4 assignments; exclusivity sum " + to_fraction(ex.clique_sum));
}

// 2. Exact signalling gap and the Farey grid of denominator 24.
Verdict theorem_gap() {
    Checks c;
    const Rational third(1, 3), half(1, 2);
    c.require(signalling_gap(TripleMarginals(third, third, third)) == Rational(1, 12), "gap at 1/3 is not 1/12");
    c.require(signalling_gap(TripleMarginals(half, half, half)) == Rational(1, 2), "gap at 1/2 is not 1/2");
    const auto rows = sweep_gap(GridSpec::farey(24));
    Rational smallest = 1;
    for (const auto& row : rows) {
        c.require(row.gap > 0, "non-positive gap at (" + to_fraction(row.p1) + ", " + to_fraction(row.p2) + ", " +
                                   to_fraction(row.p3) + ")");
        if (row.gap < smallest) smallest = row.gap;
    }
    c.require(!rows.empty(), "empty grid");
    return c.result(std::to_string(rows.size()) + " grid points, smallest gap " + to_fraction(smallest));
}

// 3. Worst-case parameters on random valid triples.
Verdict worst_case_consistency() {
    Checks c;
    oracle::SplitMix rng(2024);
    int clamped = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        for (;;) {
            const long den = 2 + static_cast<long>(rng.below(59));
            const auto draw = [&] { return Rational(1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(den - 1))), den); };
            const Rational p1 = draw(), p2 = draw(), p3 = draw();
            if (!TripleMarginals::valid(p1, p2, p3)) continue;
            const TripleMarginals t(p1, p2, p3);
            const auto w = worst_case_params(t);
            c.require(nosig_constraint_residual(w, t) == 0, "non-zero residual");
            c.require(w.alpha >= 0 && w.alpha <= 1, "alpha outside [0, 1]");
            c.require(w.beta >= 0 && w.beta <= 1, "beta outside [0, 1]");
            if (w.beta == 1 && w.alpha > 0) ++clamped;
            break;
        }
    }
    c.require(clamped > 0, "no clamped case drawn");
    return c.result("10000 triples, residual 0, " + std::to_string(clamped) + " clamped");
}

// 4. The fable at 10^5 trials for a few seeds.
Verdict fable() {
    Checks c;
    std::ostringstream note;
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        const auto s = simulate_fable(100000, seed);
        c.require(s.daniel_successes == s.trials, "Daniel failed at seed " + std::to_string(seed));
        const double first = s.sandu_first_rate();
        c.require(first >= 0.49 && first <= 0.51, "first prophecy rate " + std::to_string(first));
        note << (seed ? ", " : "") << "seed " << seed << ": daniel " << s.daniel_rate() << ", first " << first;
    }
    return c.result(note.str());
}

// 5. Assumption matrix with enumeration witnesses.
Verdict assumption_matrix() {
    Checks c;
    struct Row {
        const char* model;
        bool a, b, c;
    };
    std::ostringstream note;
    for (const Row& row : {Row{"seer", true, true, false}, Row{"firefly", true, false, true}, Row{"lsw", false, true, true}}) {
        const auto r = assumption_report(make_model(row.model));
        const std::array<std::pair<const AssumptionVerdict*, bool>, 3> cells{{{&r.a, row.a}, {&r.b, row.b}, {&r.c, row.c}}};
        const char* names = "abc";
        note << (note.tellp() > 0 ? " " : "") << row.model << "(";
        for (std::size_t i = 0; i < 3; ++i) {
            const auto& [v, want] = cells[i];
            const std::string what = std::string(row.model) + " (" + names[i] + ")";
            c.require(v->holds == want, what + " verdict");
            c.require(!v->detail.empty(), what + " has no detail");
            if (!want) c.require(!v->witness_plan.empty(), what + " has no witness plan");
            note << (v->holds ? '+' : 'x');
        }
        note << ")";
    }
    return c.result(note.str());
}

// 6. Firefly disturbance and per-context marginals.
Verdict firefly_disturbance() {
    Checks c;
    const AnyModel m = FireflyModel{};
    std::vector<std::vector<Query>> prefixes{{}};
    for (Side s : all_sides) {
        for (const auto& q : pairs_on(s)) {
            prefixes.push_back({q});
            for (Side t : all_sides) {
                for (const auto& r : pairs_on(t)) prefixes.push_back({q, r});
            }
        }
    }
    std::size_t next_checked = 0, joint_checked = 0, later_glow = 0, later_total = 0;
    for (Side s : all_sides) {
        const Query ca = parse_query(s, "CA");
        std::vector<std::optional<Query>> interludes{std::nullopt};
        for (const auto& q : pairs_on(other(s))) interludes.emplace_back(q);
        for (const auto& prefix : prefixes) {
            for (const auto& interlude : interludes) {
                // Continuations of one to three local queries on the side that asked CA.
                std::vector<std::vector<Query>> tails{{}};
                for (int depth = 0; depth < 3; ++depth) {
                    std::vector<std::vector<Query>> grown;
                    for (const auto& tail : tails) {
                        for (const auto& q : pairs_on(s)) {
                            auto t = tail;
                            t.push_back(q);
                            grown.push_back(t);
                        }
                    }
                    for (const auto& tail : grown) {
                        auto steps = prefix;
                        steps.push_back(ca);
                        if (interlude) steps.push_back(*interlude);
                        const std::size_t start = steps.size();
                        steps.insert(steps.end(), tail.begin(), tail.end());
                        std::vector<std::size_t> with_b;
                        for (std::size_t i = start; i < steps.size(); ++i) {
                            if (steps[i].contains(Box::B)) with_b.push_back(i);
                        }
                        if (with_b.empty()) continue;
                        const auto glows = [&](const History& h, std::size_t i) {
                            return h.steps[i].outcome[*steps[i].position_of(Box::B)];
                        };
                        const Plan plan = linear(steps);
                        if (tail.size() == 1) {
                            c.require(probability(m, plan, [&](const History& h) { return glows(h, start); }) == 0,
                                      "B glows on the next query in " + describe_plan(plan));
                            ++next_checked;
                        }
                        const Rational all_glow = probability(m, plan, [&](const History& h) {
                            for (std::size_t i : with_b) {
                                if (!glows(h, i)) return false;
                            }
                            return true;
                        });
                        c.require(all_glow == 0, "B glows in every later query in " + describe_plan(plan));
                        ++joint_checked;
                        if (with_b.back() != start) {
                            ++later_total;
                            if (probability(m, plan, [&](const History& h) { return glows(h, with_b.back()); }) > 0) ++later_glow;
                        }
                    }
                    tails = std::move(grown);
                }
            }
        }
    }

    for (const auto& prefix : prefixes) {
        if (prefix.size() > 1) continue;
        for (Side s : all_sides) {
            if (!prefix.empty() && prefix[0].side == s) continue;
            for (const auto& q : pairs_on(s)) {
                auto steps = prefix;
                steps.push_back(q);
                for (std::size_t corner = 0; corner < 2; ++corner) {
                    c.require(probability(m, linear(steps), [&](const History& h) { return h.steps.back().outcome[corner]; }) ==
                                  Rational(1, 2),
                              "marginal of " + q.to_string() + " is not 1/2");
                }
            }
        }
    }
    return c.result(std::to_string(next_checked) + " next-query plans and " + std::to_string(joint_checked) +
                    " continuations keep B dark; per-context marginals 1/2 (a B reading two or more local queries "
                    "later can glow in " +
                    std::to_string(later_glow) + " of " + std::to_string(later_total) + " continuations)");
}

// 7. PR boxes from pair readings.
Verdict pr_boxes() {
    Checks c;
    for (const char* name : {"seer", "firefly"}) {
        const auto model = make_model(name);
        const auto box = realize_pr_box(model, standard_interpretation());
        c.require(chsh(box).s == 4, std::string(name) + " standard S != 4");
        c.require(no_signalling_check(box).holds, std::string(name) + " standard box signals");
        const auto sweep = sweep_pr_interpretations(model);
        c.require(sweep.boxes.size() == 16, std::string(name) + " sweep size");
        std::set<std::size_t> seen;
        for (std::size_t i = 0; i < sweep.boxes.size(); ++i) {
            c.require(is_pr_box(sweep.boxes[i]), std::string(name) + " interpretation " + std::to_string(i) + " is not a PR box");
            seen.insert(sweep.pr_index[i]);
        }
        c.require(seen.size() == 8, std::string(name) + " does not reach all 8 PR boxes");
        for (std::size_t k = 0; k < 8; ++k) c.require(sweep.multiplicity[k] == 2, std::string(name) + " multiplicity");
    }
    return c.result("seer and firefly: S = 4, no-signalling, all 8 PR boxes twice each over 16 interpretations");
}

// 8. Quantum reference.
Verdict quantum_reference() {
    Checks c;
    using namespace orthobox::quantum;
    RandomMatrices rng(1);
    double povm = 0, spread = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 5;
        const auto r = povm_identity_check(rng.projector_pair(n), rng.projector_pair(n), rng.projector_pair(n));
        c.require(r.inputs_valid, "random projector pair invalid");
        povm = std::max(povm, r.deviation);
    }
    const auto frame = SpinOneFrame::standard();
    for (int trial = 0; trial < 50; ++trial) spread = std::max(spread, luders_order_spread(frame, rng.density_matrix(3)));
    const auto ent = entangled_spin1_correlations(frame);
    double marginal = 0, corr = 0;
    for (const auto& d : ent.directions) {
        marginal = std::max({marginal, std::abs(d.alice_marginal - 1.0 / 3), std::abs(d.bob_marginal - 1.0 / 3)});
        corr = std::max(corr, std::abs(d.correlation - 1.0));
    }
    c.require(povm <= tolerance, "POVM deviation " + std::to_string(povm));
    c.require(spread <= tolerance, "Lueders order spread " + std::to_string(spread));
    c.require(marginal <= tolerance && corr <= tolerance, "entangled marginals or correlation off");
    char buf[200];
    std::snprintf(buf, sizeof buf, "POVM %.1e over 100 triples, order spread %.1e over 50 states x 6 orders, marginal %.1e, correlation %.1e",
                  povm, spread, marginal, corr);
    return c.result(buf);
}

// 9. The seer cannot honour contradictory finds on the third box.
Verdict grandfather() {
    Checks c;
    const SeerModel seer;
    const Query a = parse_query(Side::alice, "A"), b = parse_query(Side::bob, "B");
    const Query ac = parse_query(Side::alice, "C"), bc = parse_query(Side::bob, "C");
    int raised = 0, reached = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Generator gen(seed);
        SamplingChooser chooser(gen);
        auto st = seer.initial_state();
        const auto oa = seer.measure(st, a, chooser);
        const auto ob = seer.measure(st, b, chooser);
        if (oa == ob) continue;  // only contradictory finds reach the forbidden step
        ++reached;
        seer.measure(st, ac, chooser);
        try {
            seer.measure(st, bc, chooser);
        } catch (const InconsistentHistory&) {
            ++raised;
        }
    }
    c.require(reached > 0 && raised == reached, "InconsistentHistory not raised");
    Rational forbidden = 0;
    for (const auto& h : enumerate_histories(seer, linear({a, b, ac, bc}))) {
        if (h.forbidden) forbidden += h.probability;
    }
    c.require(forbidden == 1, "enumeration leaves unforbidden mass");
    return c.result("raised in " + std::to_string(raised) + "/" + std::to_string(reached) + " sessions; forbidden mass " +
                    to_fraction(forbidden));
}

// 10. Sampling frequencies against exact enumeration.
Verdict sampling_matches_enumeration() {
    Checks c;
    constexpr std::uint64_t n = 100000;
    std::size_t plans = 0, keys = 0;
    double worst = 0;
    std::string worst_plan;
    for (const char* name : {"seer", "firefly", "lsw"}) {
        const auto model = make_model(name);
        std::vector<Query> queries = admissible_queries(model, Side::alice);
        for (const auto& q : admissible_queries(model, Side::bob)) queries.push_back(q);

        std::vector<Plan> family;
        for (const auto& q : queries) {
            family.push_back(linear({q}));
            for (std::size_t r = 0; r < queries.size(); ++r) {
                family.push_back(linear({q, queries[r]}));
                // Adaptive: outcome k of q continues with the query k places after r.
                PlanStep step{q, {}};
                const std::size_t outcomes = std::size_t{1} << q.size();
                for (std::size_t k = 0; k < outcomes; ++k) {
                    const Outcome on = q.size() == 1 ? Outcome((k & 1U) != 0) : Outcome((k & 1U) != 0, (k & 2U) != 0);
                    step.branches.push_back(PlanBranch{on, {PlanStep{queries[(r + k) % queries.size()], {}}}});
                }
                family.push_back(Plan{step});
            }
        }
        for (const auto& plan : family) {
            ++plans;
            const auto exact = outcome_distribution(enumerate_histories(model, plan));
            const auto counts = sample_counts(model, plan, n, 0);
            std::set<std::string> all;
            for (const auto& [k, _] : exact) all.insert(k);
            for (const auto& [k, _] : counts) all.insert(k);
            for (const auto& key : all) {
                ++keys;
                const auto e = exact.find(key);
                const double p = e == exact.end() ? 0.0 : to_double(e->second);
                const auto s = counts.find(key);
                const double count = s == counts.end() ? 0.0 : double(s->second);
                const double sd = std::sqrt(double(n) * p * (1 - p));
                const double dev = std::abs(count - double(n) * p);
                if (sd == 0) {
                    c.require(dev == 0, std::string(name) + " " + describe_plan(plan) + " " + key + " off a certain value");
                    continue;
                }
                if (dev / sd > worst) {
                    worst = dev / sd;
                    worst_plan = std::string(name) + " " + describe_plan(plan);
                }
                c.require(dev <= 4 * sd, std::string(name) + " " + describe_plan(plan) + " " + key);
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu plans, %zu outcome records, worst deviation %.2f sd (", plans, keys, worst);
    return c.result(buf + worst_plan + ")");
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Verdict (*run)();
        double limit_seconds;  // 0 when no bound applies
    };
    const std::vector<Criterion> criteria{
        {"Specker triple infeasibility", specker_triple, 1},
        {"Theorem gap", theorem_gap, 30},
        {"Worst-case parameter consistency", worst_case_consistency, 10},
        {"Fable determinism", fable, 10},
        {"Assumption matrix", assumption_matrix, 30},
        {"Firefly disturbance", firefly_disturbance, 0},
        {"PR boxes", pr_boxes, 10},
        {"Quantum reference", quantum_reference, 10},
        {"Grandfather consistency", grandfather, 0},
        {"Sampling matches enumeration", sampling_matches_enumeration, 0},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict r;
        try {
            r = criteria[i].run();
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].limit_seconds > 0 && secs > criteria[i].limit_seconds) {
            r.pass = false;
            r.note += "; over the " + std::to_string(static_cast<int>(criteria[i].limit_seconds)) + " s limit";
        }
        std::printf("%s %2zu %s (%.2f s): %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs, r.note.c_str());
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
