#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "behavior.hpp"
#include "errors.hpp"
#include "models/models.hpp"
#include "random.hpp"
#include "rational.hpp"

namespace orthobox {

/// Alice's depth-two procedure: a first query, then for some of its outcomes a
/// second query. Outcomes without an entry end the procedure.
struct AliceStrategy {
    Query first;
    std::vector<std::pair<Outcome, Query>> follow;

    Plan to_plan() const {
        PlanStep step{first, {}};
        for (const auto& [on, q] : follow) step.branches.push_back({on, {PlanStep{q, {}}}});
        return {step};
    }

    std::string describe() const { return describe_plan(to_plan()); }
};

/// Bob's outcome distribution for one query. Runs that hit a contradiction
/// are not part of `dist`; their mass is in `forbidden`.
struct BobMarginal {
    std::map<Outcome, Rational> dist;
    Rational forbidden = 0;

    Rational p(const Outcome& o) const {
        const auto it = dist.find(o);
        return it == dist.end() ? Rational(0) : it->second;
    }

    /// Probability that box `i` of the query comes out full (or glowing).
    Rational p_full(std::size_t i) const {
        Rational s = 0;
        for (const auto& [o, w] : dist) {
            if (o[i]) s += w;
        }
        return s;
    }

    bool operator==(const BobMarginal&) const = default;
};

/// Exact marginal of Bob's query after Alice runs `strategy` (or does
/// nothing), Alice's outcomes summed out.
inline BobMarginal bob_marginal(const AnyModel& model, const std::optional<AliceStrategy>& strategy, const Query& bob) {
    if (bob.side != Side::bob) throw PreconditionError("Bob's query must be on Bob's side");
    Plan plan = strategy ? strategy->to_plan() : Plan{};
    if (strategy && strategy->first.side != Side::alice) throw PreconditionError("Alice's strategy must act on Alice's side");
    plan.push_back(PlanStep{bob, {}});
    BobMarginal m;
    for (const auto& h : enumerate_histories(model, plan)) {
        if (h.forbidden) {
            m.forbidden += h.probability;
            continue;
        }
        m.dist[h.steps.back().outcome] += h.probability;
    }
    return m;
}

struct SignallingReport {
    bool signals = false;
    std::optional<AliceStrategy> strategy;
    std::optional<Query> bob_query;
    std::optional<Outcome> bob_outcome;
    Rational baseline = 0;
    Rational with_strategy = 0;
    Rational gap = 0;
    std::size_t combinations_checked = 0;
    std::size_t combinations_skipped = 0;  // some branch forbidden

    std::string describe() const {
        if (!signals) {
            return "no Alice strategy changes any Bob marginal (" + std::to_string(combinations_checked) + " checked)";
        }
        return "Alice plays '" + strategy->describe() + "'; Bob's " + bob_query->to_string() + " = " +
               bob_outcome->to_string() + " moves from " + to_fraction(baseline) + " to " + to_fraction(with_strategy) +
               " (gap " + to_fraction(gap) + ")";
    }
};

namespace detail {

inline std::vector<Outcome> reachable_outcomes(const AnyModel& model, const Query& q) {
    std::vector<Outcome> out;
    for (const auto& h : enumerate_histories(model, Plan{PlanStep{q, {}}})) {
        if (h.forbidden || h.probability == 0) continue;
        const Outcome o = h.steps.front().outcome;
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Every depth-two strategy over Alice's admissible queries. Second queries
/// are only attached to outcomes the first query can actually produce.
inline std::vector<AliceStrategy> all_alice_strategies(const AnyModel& model) {
    const auto queries = admissible_queries(model, Side::alice);
    std::vector<AliceStrategy> out;
    for (const auto& first : queries) {
        const auto outcomes = detail::reachable_outcomes(model, first);
        std::vector<std::size_t> pick(outcomes.size(), 0);  // 0 = stop, k = queries[k-1]
        for (;;) {
            AliceStrategy s{first, {}};
            for (std::size_t i = 0; i < outcomes.size(); ++i) {
                if (pick[i] > 0) s.follow.emplace_back(outcomes[i], queries[pick[i] - 1]);
            }
            out.push_back(std::move(s));
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] > queries.size()) pick[i++] = 0;
            if (i == pick.size()) break;
        }
    }
    return out;
}

/// Searches all depth-two Alice strategies and all Bob queries for a change
/// in Bob's outcome distribution relative to Alice doing nothing. Combinations
/// with a forbidden branch cannot be carried out and are skipped. The witness
/// is the first combination reaching the largest change in a single outcome
/// probability.
inline SignallingReport detect_signalling(const AnyModel& model) {
    SignallingReport report;
    const auto bob_queries = admissible_queries(model, Side::bob);
    std::vector<BobMarginal> baselines;
    for (const auto& q : bob_queries) baselines.push_back(bob_marginal(model, std::nullopt, q));

    for (const auto& strategy : all_alice_strategies(model)) {
        for (std::size_t b = 0; b < bob_queries.size(); ++b) {
            const BobMarginal m = bob_marginal(model, strategy, bob_queries[b]);
            if (m.forbidden != 0) {
                ++report.combinations_skipped;
                continue;
            }
            ++report.combinations_checked;
            if (m == baselines[b]) continue;
            report.signals = true;
            std::map<Outcome, int> keys;
            for (const auto& [o, w] : m.dist) keys[o];
            for (const auto& [o, w] : baselines[b].dist) keys[o];
            for (const auto& [o, unused] : keys) {
                const Rational before = baselines[b].p(o);
                const Rational after = m.p(o);
                const Rational gap = abs(after - before);
                if (gap > report.gap) {
                    report.gap = gap;
                    report.strategy = strategy;
                    report.bob_query = bob_queries[b];
                    report.bob_outcome = o;
                    report.baseline = before;
                    report.with_strategy = after;
                }
            }
        }
    }
    return report;
}

struct AssumptionVerdict {
    bool holds = true;
    std::string witness_plan;  // empty when the assumption holds
    std::string detail;
};

struct AssumptionReport {
    std::string model;
    AssumptionVerdict a, b, c;
};

namespace detail {

/// A local procedure on one side that reads box `x`: the steps, and where
/// among them x is read.
struct Procedure {
    std::vector<Query> steps;
    std::size_t step = 0;
    std::size_t position = 0;
};

inline std::vector<Procedure> procedures_reading(const AnyModel& model, Side side, Box x) {
    std::vector<Procedure> out;
    const Query single = Query::single(side, x);
    const bool singles = admits(model, single);
    if (singles) out.push_back({{single}, 0, 0});
    for (const Query& q : admissible_queries(model, side)) {
        if (q.is_pair() && measures(model, q, x)) out.push_back({{q}, 0, *q.position_of(x)});
    }
    if (singles) {
        for (Box y : all_boxes) {
            if (y == x) continue;
            const Query other_single = Query::single(side, y);
            if (!admits(model, other_single)) continue;
            out.push_back({{other_single, single}, 1, 0});
            out.push_back({{single, other_single}, 0, 0});
        }
    }
    return out;
}

/// All interleavings of two step sequences; each entry lists, per executed
/// step, (party, index within that party's sequence).
inline std::vector<std::vector<std::pair<int, std::size_t>>> interleavings(std::size_t na, std::size_t nb) {
    std::vector<std::vector<std::pair<int, std::size_t>>> out;
    std::vector<std::pair<int, std::size_t>> cur;
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        if (i == na && j == nb) {
            out.push_back(cur);
            return;
        }
        if (i < na) {
            cur.emplace_back(0, i);
            self(self, i + 1, j);
            cur.pop_back();
        }
        if (j < nb) {
            cur.emplace_back(1, j);
            self(self, i, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

inline Plan linear_plan(const std::vector<Query>& steps) {
    Plan p;
    for (const auto& q : steps) p.push_back(PlanStep{q, {}});
    return p;
}

inline std::string distribution_text(const std::map<std::string, Rational>& d) {
    std::string s;
    for (const auto& [k, v] : d) {
        if (!s.empty()) s += ", ";
        s += k + ": " + to_fraction(v);
    }
    return "{" + s + "}";
}

}  // namespace detail

/// How the two local procedures are scheduled in the cross-side check of
/// assumption (a). `alice_first` runs Alice's whole procedure, then Bob's.
/// `fable_shape` is the same but Bob reads X with one query, which is how the
/// fable is played. `any_interleaving` tries every merge of the two step
/// sequences.
enum class CorrelationSchedule : std::uint8_t { alice_first, fable_shape, any_interleaving };

/// Assumption (a): whenever both sides read the same box X, in any local
/// procedure, no allowed run shows different contents; and each box is full
/// with probability strictly between 0 and 1.
inline AssumptionVerdict test_assumption_a(const AnyModel& model,
                                           CorrelationSchedule schedule = CorrelationSchedule::alice_first) {
    std::size_t procedures = 0, plans = 0;
    for (Box x : all_boxes) {
        for (const auto& proc : detail::procedures_reading(model, Side::alice, x)) {
            ++procedures;
            Rational full = 0;
            for (const auto& h : enumerate_histories(model, detail::linear_plan(proc.steps))) {
                if (!h.forbidden && h.steps[proc.step].outcome[proc.position]) full += h.probability;
            }
            if (full == 0 || full == 1) {
                return {false, describe_plan(detail::linear_plan(proc.steps)),
                        std::string("box ") + box_letter(x) + " is full with probability " + to_fraction(full)};
            }
        }
    }
    for (Box x : all_boxes) {
        const auto mine = detail::procedures_reading(model, Side::alice, x);
        const auto theirs = detail::procedures_reading(model, Side::bob, x);
        for (const auto& pa : mine) {
            for (const auto& pb : theirs) {
                if (schedule == CorrelationSchedule::fable_shape && pb.steps.size() > 1) continue;
                auto orders = detail::interleavings(pa.steps.size(), pb.steps.size());
                // interleavings() lists the Alice-first order first.
                if (schedule != CorrelationSchedule::any_interleaving) orders.resize(1);
                for (const auto& order : orders) {
                    std::vector<Query> steps;
                    std::size_t at_a = 0, at_b = 0;
                    for (std::size_t i = 0; i < order.size(); ++i) {
                        const auto [party, k] = order[i];
                        steps.push_back(party == 0 ? pa.steps[k] : pb.steps[k]);
                        if (party == 0 && k == pa.step) at_a = i;
                        if (party == 1 && k == pb.step) at_b = i;
                    }
                    const Plan plan = detail::linear_plan(steps);
                    ++plans;
                    Rational mismatch = 0;
                    for (const auto& h : enumerate_histories(model, plan)) {
                        if (h.forbidden) continue;
                        if (h.steps[at_a].outcome[pa.position] != h.steps[at_b].outcome[pb.position]) {
                            mismatch += h.probability;
                        }
                    }
                    if (mismatch != 0) {
                        return {false, describe_plan(plan),
                                std::string("alice and bob read different contents of box ") + box_letter(x) +
                                    " with probability " + to_fraction(mismatch) + "; outcomes " +
                                    detail::distribution_text(outcome_distribution(enumerate_histories(model, plan)))};
                    }
                }
            }
        }
    }
    return {true, "",
            std::to_string(procedures) + " local procedures have nontrivial marginals and " + std::to_string(plans) +
                " cross-side plans show matching readings"};
}

/// Assumption (b): each box has a single-box query, and for each pair
/// context, opening the two boxes one at a time in either order gives the
/// same joint distribution as the pair query (on a fresh system).
inline AssumptionVerdict test_assumption_b(const AnyModel& model) {
    std::size_t contexts = 0;
    for (Box x : all_boxes) {
        const Query q = Query::single(Side::alice, x);
        if (!admits(model, q)) {
            return {false, describe_plan(detail::linear_plan({q})),
                    std::string("box ") + box_letter(x) + " admits no single-box query"};
        }
    }
    for (const Query& pair : admissible_queries(model, Side::alice)) {
        if (!pair.is_pair()) continue;
        const Box x = pair.first;
        const Box y = *pair.second;
        auto joint = [&](const Plan& plan, bool reversed) {
            std::map<std::string, Rational> d;
            for (const auto& h : enumerate_histories(model, plan)) {
                std::string key;
                if (h.forbidden) {
                    key = "forbidden";
                } else if (plan.size() == 1) {
                    key = h.steps[0].outcome.to_string();
                } else {
                    const bool vx = h.steps[reversed ? 1 : 0].outcome[0];
                    const bool vy = h.steps[reversed ? 0 : 1].outcome[0];
                    key = Outcome(vx, vy).to_string();
                }
                d[key] += h.probability;
            }
            return d;
        };
        const Plan together = detail::linear_plan({pair});
        const Plan forward = detail::linear_plan({Query::single(Side::alice, x), Query::single(Side::alice, y)});
        const Plan backward = detail::linear_plan({Query::single(Side::alice, y), Query::single(Side::alice, x)});
        const auto d0 = joint(together, false);
        for (const auto& [plan, reversed] : {std::pair{forward, false}, std::pair{backward, true}}) {
            const auto d = joint(plan, reversed);
            if (d != d0) {
                return {false, describe_plan(plan),
                        "joint of " + pair.target() + " is " + detail::distribution_text(d) + " but the pair query gives " +
                            detail::distribution_text(d0)};
            }
        }
        ++contexts;
    }
    return {true, "",
            "single-box queries exist and reproduce the joint of all " + std::to_string(contexts) +
                " pair contexts in both orders"};
}

/// Assumption (c): the negation of detect_signalling, with its witness.
inline AssumptionVerdict test_assumption_c(const AnyModel& model) {
    const SignallingReport r = detect_signalling(model);
    if (!r.signals) return {true, "", r.describe()};
    Plan plan = r.strategy->to_plan();
    plan.push_back(PlanStep{*r.bob_query, {}});
    return {false, describe_plan(plan), r.describe()};
}

inline AssumptionReport assumption_report(const AnyModel& model) {
    return {model_name(model), test_assumption_a(model), test_assumption_b(model), test_assumption_c(model)};
}

/// Fable statistics. Daniel plays on Bob's side, Sandu on Alice's.
struct FableTrial {
    bool daniel_success = false;
    bool sandu_first = false;
    bool sandu_second = false;
};

struct FableStats {
    std::uint64_t trials = 0;
    std::uint64_t daniel_successes = 0;
    std::uint64_t sandu_first_successes = 0;
    std::uint64_t sandu_second_successes = 0;
    std::vector<FableTrial> per_trial;

    double daniel_rate() const { return trials ? double(daniel_successes) / double(trials) : 0.0; }
    double sandu_first_rate() const { return trials ? double(sandu_first_successes) / double(trials) : 0.0; }
    double sandu_second_rate() const { return trials ? double(sandu_second_successes) / double(trials) : 0.0; }
};

/// Sandu's adaptive plan against Daniel's announced pair (x, y) with the
/// prophecy "x full, y empty": open the third box z; if full, open y, else x.
inline Plan fable_plan(Box x, Box y) {
    Box z = Box::A;
    for (Box b : all_boxes) {
        if (b != x && b != y) z = b;
    }
    const Query daniel = (index(x) + 1) % 3 == index(y) ? Query::pair(Side::bob, x, y) : Query::pair(Side::bob, y, x);
    PlanStep first{Query::single(Side::alice, z), {}};
    first.branches.push_back({Outcome(true), {PlanStep{Query::single(Side::alice, y), {}}}});
    first.branches.push_back({Outcome(false), {PlanStep{Query::single(Side::alice, x), {}}}});
    return {first, PlanStep{daniel, {}}};
}

/// Each trial: Daniel picks a pair and which of its boxes will be full
/// (uniformly), Sandu guesses his first box uniformly, then the seer model runs
/// the fable plan. Draw order per trial: pair, prophecy, guess, model.
inline FableStats simulate_fable(std::uint64_t trials, std::uint64_t seed = Generator::default_seed,
                                 bool keep_per_trial = false) {
    if (trials < 1) throw PreconditionError("the fable needs at least one trial");
    const SeerModel seer;
    Generator gen(seed);
    FableStats stats;
    stats.trials = trials;
    constexpr std::array<std::array<Box, 2>, 3> pairs{{{Box::A, Box::B}, {Box::B, Box::C}, {Box::C, Box::A}}};
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto& pair = pairs[gen.pick_uniform(3)];
        const bool first_full = gen.pick_uniform(2) == 0;
        const Box x = first_full ? pair[0] : pair[1];  // prophesied full
        const Box y = first_full ? pair[1] : pair[0];  // prophesied empty
        const bool sandu_guess = gen.pick_uniform(2) == 0;

        const History h = sample_history(seer, fable_plan(x, y), gen);
        if (h.forbidden) throw InconsistentHistory("fable trial hit a contradiction: " + h.reason);
        const bool z_full = h.steps[0].outcome[0];
        const bool second_full = h.steps[1].outcome[0];
        const HistoryStep& d = h.steps[2];
        const bool x_full = d.outcome[*d.query.position_of(x)];
        const bool y_full = d.outcome[*d.query.position_of(y)];

        FableTrial trial;
        trial.daniel_success = x_full && !y_full;
        trial.sandu_first = sandu_guess == z_full;
        trial.sandu_second = second_full == !z_full;
        stats.daniel_successes += trial.daniel_success;
        stats.sandu_first_successes += trial.sandu_first;
        stats.sandu_second_successes += trial.sandu_second;
        if (keep_per_trial) stats.per_trial.push_back(trial);
    }
    return stats;
}

/// How one party's setting is measured: a query on that party's side and
/// which of its boxes supplies the +1 (full / glowing) or -1 result.
struct Reading {
    Query query;
    std::size_t position = 0;

    std::string describe() const {
        return std::string(1, box_letter(query.box(position))) + (query.is_pair() ? " in " + query.target() : "");
    }
};

struct BoxInterpretation {
    std::array<Reading, 2> alice;  // settings a, a'
    std::array<Reading, 2> bob;    // settings b, b'
};

/// a = A in AB, a' = C in CA on the first party; b = A in AB, b' = B in BC on the second.
inline BoxInterpretation standard_interpretation() {
    return {{Reading{Query::pair(Side::alice, Box::A, Box::B), 0}, Reading{Query::pair(Side::alice, Box::C, Box::A), 0}},
            {Reading{Query::pair(Side::bob, Box::A, Box::B), 0}, Reading{Query::pair(Side::bob, Box::B, Box::C), 0}}};
}

/// The 16 ways of reading the first or second box of each standard pair.
inline std::vector<BoxInterpretation> all_pair_interpretations() {
    std::vector<BoxInterpretation> out;
    for (unsigned mask = 0; mask < 16; ++mask) {
        BoxInterpretation i = standard_interpretation();
        i.alice[0].position = mask & 1U;
        i.alice[1].position = (mask >> 1) & 1U;
        i.bob[0].position = (mask >> 2) & 1U;
        i.bob[1].position = (mask >> 3) & 1U;
        out.push_back(i);
    }
    return out;
}

/// One box opened per side: A or B on the first party, A or C on the second.
inline BoxInterpretation single_query_interpretation() {
    return {{Reading{Query::single(Side::alice, Box::A), 0}, Reading{Query::single(Side::alice, Box::B), 0}},
            {Reading{Query::single(Side::bob, Box::A), 0}, Reading{Query::single(Side::bob, Box::C), 0}}};
}

/// Two-party box from one query per side (first party's query first), by
/// exact enumeration. Outcome +1 is full (glowing), -1 is empty (dark).
inline BehaviorTable realize_pr_box(const AnyModel& model, const BoxInterpretation& interp) {
    for (const auto& r : interp.alice) {
        if (r.query.side != Side::alice) throw PreconditionError("first party's readings must be on Alice's side");
    }
    for (const auto& r : interp.bob) {
        if (r.query.side != Side::bob) throw PreconditionError("second party's readings must be on Bob's side");
    }
    std::vector<Rational> probs;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            const Reading& ra = interp.alice[x];
            const Reading& rb = interp.bob[y];
            std::array<std::array<Rational, 2>, 2> cell{};
            const Plan plan{PlanStep{ra.query, {}}, PlanStep{rb.query, {}}};
            for (const auto& h : enumerate_histories(model, plan)) {
                if (h.forbidden) throw InconsistentHistory("box realization hit a contradiction: " + h.reason);
                const std::size_t a = h.steps[0].outcome[ra.position] ? 0 : 1;
                const std::size_t b = h.steps[1].outcome[rb.position] ? 0 : 1;
                cell[a][b] += h.probability;
            }
            for (const auto& row : cell) {
                for (const auto& v : row) probs.push_back(v);
            }
        }
    }
    return BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {{1, -1}, {1, -1}}, std::move(probs));
}

struct PrSweep {
    std::vector<BehaviorTable> boxes;           // one per interpretation, in order
    std::vector<std::size_t> pr_index;          // index into enumerate_pr_boxes(), or npos
    std::array<std::size_t, 8> multiplicity{};  // how often each PR box appears
};

inline PrSweep sweep_pr_interpretations(const AnyModel& model) {
    PrSweep sweep;
    const auto reference = enumerate_pr_boxes();
    for (const auto& interp : all_pair_interpretations()) {
        BehaviorTable t = realize_pr_box(model, interp);
        std::size_t found = static_cast<std::size_t>(-1);
        for (std::size_t k = 0; k < reference.size(); ++k) {
            if (reference[k] == t) found = k;
        }
        if (found != static_cast<std::size_t>(-1)) ++sweep.multiplicity[found];
        sweep.pr_index.push_back(found);
        sweep.boxes.push_back(std::move(t));
    }
    return sweep;
}

}  // namespace orthobox
