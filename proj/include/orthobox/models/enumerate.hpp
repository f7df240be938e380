#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "../errors.hpp"
#include "../random.hpp"
#include "../rational.hpp"
#include "query.hpp"

namespace orthobox {

struct PlanStep;

/// Sub-plan run right after a step whose outcome equals `on`.
struct PlanBranch {
    Outcome on;
    std::vector<PlanStep> steps;
};

/// One query, optionally followed by outcome-dependent sub-plans. Outcomes
/// without a branch simply continue with the next step.
struct PlanStep {
    Query query;
    std::vector<PlanBranch> branches;
};

using Plan = std::vector<PlanStep>;

struct HistoryStep {
    Query query;
    Outcome outcome;
    auto operator<=>(const HistoryStep&) const = default;
};

/// One run of a plan. `probability` is the exact mass of the hidden choices
/// that led here; a forbidden run keeps the mass of the prefix that reached
/// the contradiction, so a full enumeration always sums to 1.
struct History {
    std::vector<HistoryStep> steps;
    Rational probability = 1;
    bool forbidden = false;
    std::string reason;

    /// "alice CA=+-; bob BC=-+", with " !forbidden" appended when forbidden.
    std::string key() const {
        std::string k;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (i) k += "; ";
            k += steps[i].query.to_string() + "=" + steps[i].outcome.to_string();
        }
        if (forbidden) k += " !forbidden";
        return k;
    }
};

template <class M>
concept SequentialModel = requires(const M& m, typename M::State& st, const Query& q, Generator& g) {
    { m.initial_state() } -> std::same_as<typename M::State>;
    { m.admits(q) } -> std::convertible_to<bool>;
    { m.name() } -> std::convertible_to<std::string>;
};

/// Draws every choice from a seeded Generator.
class SamplingChooser {
public:
    explicit SamplingChooser(Generator& gen) : gen_(&gen) {}
    std::size_t choose(std::span<const Rational> weights) { return gen_->pick(weights); }
    bool choose_bool(const Rational& q) { return gen_->bernoulli(q); }

private:
    Generator* gen_;
};

namespace detail {

/// Replays a fixed prefix of choices, then takes the first positive-weight
/// branch at every new choice point while recording it.
class ReplayChooser {
public:
    struct Point {
        std::vector<Rational> weights;
        std::size_t chosen = 0;
    };

    explicit ReplayChooser(std::vector<Point>& points) : points_(&points) {}

    std::size_t choose(std::span<const Rational> weights) {
        Rational total = 0;
        for (const auto& w : weights) total += w;
        if (total <= 0) throw PreconditionError("all branch weights are zero");
        if (cursor_ == points_->size()) {
            Point p{std::vector<Rational>(weights.begin(), weights.end()), 0};
            while (p.weights[p.chosen] == 0) ++p.chosen;
            points_->push_back(std::move(p));
        }
        const Point& p = (*points_)[cursor_++];
        probability_ *= p.weights[p.chosen] / total;
        return p.chosen;
    }

    const Rational& probability() const { return probability_; }

private:
    std::vector<Point>* points_;
    std::size_t cursor_ = 0;
    Rational probability_ = 1;
};

/// Moves to the next branch in depth-first order; false once exhausted.
inline bool advance(std::vector<ReplayChooser::Point>& points) {
    while (!points.empty()) {
        auto& p = points.back();
        std::size_t next = p.chosen + 1;
        while (next < p.weights.size() && p.weights[next] == 0) ++next;
        if (next < p.weights.size()) {
            p.chosen = next;
            return true;
        }
        points.pop_back();
    }
    return false;
}

template <class M, class Chooser>
void run_steps(const M& model, typename M::State& st, const Plan& plan, Chooser& chooser, History& h) {
    for (const auto& step : plan) {
        if (!model.admits(step.query)) {
            throw InadmissibleQuery(model.name() + " does not admit query '" + step.query.to_string() + "'");
        }
        const Outcome out = model.measure(st, step.query, chooser);
        h.steps.push_back({step.query, out});
        for (const auto& br : step.branches) {
            if (br.on == out) {
                run_steps(model, st, br.steps, chooser, h);
                break;
            }
        }
    }
}

template <class M, class Chooser>
History run_once(const M& model, const Plan& plan, Chooser& chooser) {
    History h;
    auto st = model.initial_state();
    try {
        run_steps(model, st, plan, chooser, h);
    } catch (const InconsistentHistory& e) {
        h.forbidden = true;
        h.reason = e.what();
    }
    return h;
}

}  // namespace detail

/// Checks every query of the plan (including all branches) against the model.
template <SequentialModel M>
void check_plan(const M& model, const Plan& plan) {
    for (const auto& step : plan) {
        if (!model.admits(step.query)) {
            throw InadmissibleQuery(model.name() + " does not admit query '" + step.query.to_string() + "'");
        }
        for (const auto& br : step.branches) {
            if (br.on.size() != step.query.size()) {
                throw PreconditionError("branch outcome '" + br.on.to_string() + "' does not fit query '" +
                                        step.query.to_string() + "'");
            }
            check_plan(model, br.steps);
        }
    }
}

/// Every branch of hidden choices, each with its exact probability. Runs that
/// hit an InconsistentHistory are kept and flagged forbidden.
template <SequentialModel M>
std::vector<History> enumerate_histories(const M& model, const Plan& plan) {
    check_plan(model, plan);
    std::vector<History> out;
    std::vector<detail::ReplayChooser::Point> points;
    do {
        detail::ReplayChooser chooser(points);
        History h = detail::run_once(model, plan, chooser);
        h.probability = chooser.probability();
        out.push_back(std::move(h));
    } while (detail::advance(points));
    return out;
}

/// One seeded run; `probability` is left at 1.
template <SequentialModel M>
History sample_history(const M& model, const Plan& plan, Generator& gen) {
    SamplingChooser chooser(gen);
    return detail::run_once(model, plan, chooser);
}

/// Histories merged by observable record (steps plus forbidden flag).
inline std::map<std::string, Rational> outcome_distribution(const std::vector<History>& histories) {
    std::map<std::string, Rational> dist;
    for (const auto& h : histories) dist[h.key()] += h.probability;
    return dist;
}

template <SequentialModel M>
std::map<std::string, std::uint64_t> sample_counts(const M& model, const Plan& plan, std::uint64_t trials,
                                                   std::uint64_t seed = Generator::default_seed) {
    check_plan(model, plan);
    Generator gen(seed);
    std::map<std::string, std::uint64_t> counts;
    for (std::uint64_t t = 0; t < trials; ++t) ++counts[sample_history(model, plan, gen).key()];
    return counts;
}

}  // namespace orthobox
