#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "scenario.hpp"
#include "simplex.hpp"

namespace orthobox {

/// Outcome probabilities of a one- or two-party box, one conditional
/// distribution per combination of settings.
///
/// Storage is row major: setting combinations in lexicographic order (party 0
/// slowest), and within each, outcome combinations in lexicographic order.
class BehaviorTable {
public:
    BehaviorTable(std::vector<std::vector<std::string>> settings, std::vector<std::vector<int>> outcomes,
                  std::vector<Rational> probabilities)
        : settings_(std::move(settings)), outcomes_(std::move(outcomes)), probs_(std::move(probabilities)) {
        validate();
    }

    std::size_t parties() const noexcept { return settings_.size(); }
    const std::vector<std::string>& settings(std::size_t party) const { return settings_.at(party); }
    const std::vector<int>& outcomes(std::size_t party) const { return outcomes_.at(party); }
    const std::vector<Rational>& probabilities() const noexcept { return probs_; }

    std::size_t setting_combinations() const {
        std::size_t n = 1;
        for (const auto& s : settings_) n *= s.size();
        return n;
    }
    std::size_t outcome_combinations() const {
        std::size_t n = 1;
        for (const auto& o : outcomes_) n *= o.size();
        return n;
    }

    /// p(outcome indices | setting indices); index vectors have one entry per party.
    const Rational& p(const std::vector<std::size_t>& setting, const std::vector<std::size_t>& outcome) const {
        return probs_.at(flat_index(setting, outcome));
    }

    /// Two-party shorthand: p(a, b | x, y) by index.
    const Rational& p(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const { return p({x, y}, {a, b}); }

    /// Marginal distribution of `party` for its setting `x`, with the other party at setting `other`.
    std::vector<Rational> marginal(std::size_t party, std::size_t x, std::size_t other) const {
        if (parties() != 2) throw PreconditionError("marginal() needs a two-party table");
        std::vector<Rational> out(outcomes_[party].size(), Rational(0));
        const std::size_t o = 1 - party;
        for (std::size_t a = 0; a < outcomes_[party].size(); ++a) {
            for (std::size_t b = 0; b < outcomes_[o].size(); ++b) {
                std::vector<std::size_t> setting(2), outcome(2);
                setting[party] = x;
                setting[o] = other;
                outcome[party] = a;
                outcome[o] = b;
                out[a] += p(setting, outcome);
            }
        }
        return out;
    }

    friend bool operator==(const BehaviorTable&, const BehaviorTable&) = default;

private:
    std::size_t flat_index(const std::vector<std::size_t>& setting, const std::vector<std::size_t>& outcome) const {
        if (setting.size() != parties() || outcome.size() != parties()) {
            throw PreconditionError("index arity does not match the number of parties");
        }
        std::size_t s = 0, o = 0;
        for (std::size_t k = 0; k < parties(); ++k) {
            if (setting[k] >= settings_[k].size() || outcome[k] >= outcomes_[k].size()) {
                throw PreconditionError("setting or outcome index out of range");
            }
            s = s * settings_[k].size() + setting[k];
            o = o * outcomes_[k].size() + outcome[k];
        }
        return s * outcome_combinations() + o;
    }

    void validate() const {
        if (parties() < 1 || parties() > 2) throw PreconditionError("a behavior table has 1 or 2 parties");
        if (outcomes_.size() != settings_.size()) throw PreconditionError("settings and outcomes disagree on parties");
        for (std::size_t k = 0; k < parties(); ++k) {
            if (settings_[k].empty() || outcomes_[k].empty()) {
                throw PreconditionError("every party needs at least one setting and one outcome");
            }
        }
        const std::size_t per = outcome_combinations();
        if (probs_.size() != setting_combinations() * per) {
            throw PreconditionError("expected " + std::to_string(setting_combinations() * per) +
                                    " probabilities, got " + std::to_string(probs_.size()));
        }
        for (std::size_t s = 0; s < setting_combinations(); ++s) {
            Rational total = 0;
            for (std::size_t o = 0; o < per; ++o) {
                const Rational& v = probs_[s * per + o];
                if (v < 0 || v > 1) throw PreconditionError("probability " + to_fraction(v) + " outside [0,1]");
                total += v;
            }
            if (total != 1) {
                throw PreconditionError("conditional distribution #" + std::to_string(s) + " sums to " +
                                        to_fraction(total));
            }
        }
    }

    std::vector<std::vector<std::string>> settings_;
    std::vector<std::vector<int>> outcomes_;
    std::vector<Rational> probs_;
};

// ---------------------------------------------------------------------------
// Exclusivity and joint feasibility

struct ExclusivityCheck {
    bool holds = true;
    std::optional<PropSet> violating_clique;  // maximal, lexicographically first by mask
    Rational clique_sum = 0;                  // sum over the violating clique, else the largest clique sum
};

/// Pairwise orthogonal propositions must have marginals summing to at most 1.
inline ExclusivityCheck check_exclusivity(const MarginalVector& m, const OrthoGraph& g) {
    if (m.size() != g.size()) throw PreconditionError("marginals do not cover the graph");
    ExclusivityCheck out;
    const auto cliques = g.cliques();
    for (PropSet c : cliques) {
        const Rational sum = m.sum_over(c);
        if (sum > out.clique_sum) out.clique_sum = sum;
    }
    // A superset of a violating clique violates too, so the maximal violators are
    // exactly the violating maximal cliques.
    for (PropSet c : cliques) {
        const bool maximal = std::none_of(cliques.begin(), cliques.end(),
                                          [c](PropSet d) { return d != c && is_subset(c, d); });
        if (!maximal) continue;
        const Rational sum = m.sum_over(c);
        if (sum > 1) {
            out.holds = false;
            out.violating_clique = c;
            out.clique_sum = sum;
            break;
        }
    }
    return out;
}

/// Evidence for or against a joint distribution over 0/1 assignments.
struct FeasibilityCertificate {
    bool feasible = false;
    /// Feasible: the support, as (assignment, mass); assignments are independent sets.
    std::vector<std::pair<PropSet, Rational>> distribution;
    /// Infeasible: sum_v weights[v] x_v <= bound for every admissible assignment x,
    /// yet sum_v weights[v] p_v > bound.
    std::vector<Rational> weights;
    Rational bound = 0;

    /// Re-derives the marginals of `distribution`.
    std::vector<Rational> reproduced_marginals(std::size_t vertices) const {
        std::vector<Rational> out(vertices, Rational(0));
        for (const auto& [assignment, mass] : distribution) {
            for (std::size_t v = 0; v < vertices; ++v) {
                if (assignment & (PropSet{1} << v)) out[v] += mass;
            }
        }
        return out;
    }
};

/// Independent sets of `g`, i.e. the 0/1 assignments with no two adjacent ones; increasing mask order.
inline std::vector<PropSet> admissible_assignments(const OrthoGraph& g) {
    std::vector<PropSet> out;
    const PropSet all = (PropSet{1} << g.size()) - 1;
    for (PropSet m = 0;; ++m) {
        if (g.is_independent(m)) out.push_back(m);
        if (m == all) break;
    }
    return out;
}

/// Decides whether some distribution over admissible assignments has marginals `m`.
inline FeasibilityCertificate joint_feasibility(const OrthoGraph& g, const MarginalVector& m) {
    if (m.size() != g.size()) throw PreconditionError("marginals do not cover the graph");
    const auto columns = admissible_assignments(g);
    const std::size_t n = g.size();
    // Rows: one per vertex (marginal constraint), then normalization.
    std::vector<std::vector<Rational>> a(n + 1, std::vector<Rational>(columns.size(), Rational(0)));
    std::vector<Rational> b(n + 1);
    for (std::size_t c = 0; c < columns.size(); ++c) {
        for (std::size_t v = 0; v < n; ++v) {
            if (columns[c] & (PropSet{1} << v)) a[v][c] = 1;
        }
        a[n][c] = 1;
    }
    for (std::size_t v = 0; v < n; ++v) b[v] = m[v];
    b[n] = 1;

    const auto lp = solve_feasibility(a, b);
    FeasibilityCertificate out;
    out.feasible = lp.feasible;
    if (lp.feasible) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (lp.point[c] != 0) out.distribution.emplace_back(columns[c], lp.point[c]);
        }
    } else {
        // y^T A_c = sum_{v in c} y_v + y_n <= 0 and y^T b = sum y_v p_v + y_n > 0.
        out.weights.assign(lp.farkas.begin(), lp.farkas.begin() + static_cast<std::ptrdiff_t>(n));
        out.bound = -lp.farkas[n];
    }
    return out;
}

// ---------------------------------------------------------------------------
// No-signalling and CHSH

struct NoSignallingWitness {
    std::size_t party = 0;    // whose marginal moves
    std::size_t setting = 0;  // that party's setting
    std::size_t other_first = 0, other_second = 0;
    std::vector<Rational> first_marginal, second_marginal;
};

struct NoSignallingCheck {
    bool holds = true;
    std::optional<NoSignallingWitness> witness;
};

inline NoSignallingCheck no_signalling_check(const BehaviorTable& t) {
    if (t.parties() != 2) throw PreconditionError("no-signalling check needs a two-party table");
    NoSignallingCheck out;
    for (std::size_t party = 0; party < 2; ++party) {
        const std::size_t other_count = t.settings(1 - party).size();
        for (std::size_t x = 0; x < t.settings(party).size(); ++x) {
            const auto reference = t.marginal(party, x, 0);
            for (std::size_t y = 1; y < other_count; ++y) {
                auto m = t.marginal(party, x, y);
                if (m != reference) {
                    out.holds = false;
                    out.witness = NoSignallingWitness{party, x, 0, y, reference, std::move(m)};
                    return out;
                }
            }
        }
    }
    return out;
}

/// Which setting index plays a/a' (party 0) and b/b' (party 1).
struct ChshOrdering {
    std::array<std::size_t, 2> first{0, 1};
    std::array<std::size_t, 2> second{0, 1};
};

struct ChshValue {
    Rational s = 0;
    /// Correlators in the order E(ab), E(ab'), E(a'b), E(a'b').
    std::array<Rational, 4> correlators{};
    /// Achieving sign placement over the same four terms (an odd number of -1).
    std::array<int, 4> signs{};
};

namespace detail {

inline void require_chsh_shape(const BehaviorTable& t) {
    if (t.parties() != 2) throw PreconditionError("CHSH needs a two-party table");
    for (std::size_t k = 0; k < 2; ++k) {
        if (t.settings(k).size() != 2) throw PreconditionError("CHSH needs exactly two settings per party");
        if (t.outcomes(k).size() != 2) throw PreconditionError("CHSH needs two outcomes per party");
        for (int v : t.outcomes(k)) {
            if (v != 1 && v != -1) throw PreconditionError("CHSH needs outcomes labelled +1/-1");
        }
    }
}

}  // namespace detail

inline Rational correlator(const BehaviorTable& t, std::size_t x, std::size_t y) {
    Rational e = 0;
    for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t b = 0; b < 2; ++b) e += t.outcomes(0)[a] * t.outcomes(1)[b] * t.p(x, y, a, b);
    }
    return e;
}

/// Maximum of sum_k signs_k E_k over the eight placements with an odd number of
/// minus signs; this equals the largest |E(ab)+E(ab')+E(a'b)-E(a'b')| over relabelings.
inline ChshValue chsh(const BehaviorTable& t, const ChshOrdering& order = {}) {
    detail::require_chsh_shape(t);
    ChshValue out;
    out.correlators = {correlator(t, order.first[0], order.second[0]), correlator(t, order.first[0], order.second[1]),
                       correlator(t, order.first[1], order.second[0]), correlator(t, order.first[1], order.second[1])};
    bool have = false;
    for (unsigned pattern = 0; pattern < 16; ++pattern) {
        if (std::popcount(pattern) % 2 == 0) continue;
        std::array<int, 4> signs{};
        Rational value = 0;
        for (std::size_t k = 0; k < 4; ++k) {
            signs[k] = (pattern >> k) & 1U ? -1 : 1;
            value += signs[k] * out.correlators[k];
        }
        if (!have || value > out.s) {
            out.s = value;
            out.signs = signs;
            have = true;
        }
    }
    return out;
}

/// PR box with p(a,b|x,y) = 1/2 when a*b = sign(x,y); sign indices follow (ab, ab', a'b, a'b').
inline BehaviorTable pr_box(const std::array<int, 4>& correlation_signs) {
    int product = 1;
    for (int c : correlation_signs) {
        if (c != 1 && c != -1) throw PreconditionError("PR correlation signs must be +1/-1");
        product *= c;
    }
    if (product != -1) throw PreconditionError("a PR box has an odd number of anticorrelated setting pairs");
    const std::vector<int> pm{1, -1};
    std::vector<Rational> probs;
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t y = 0; y < 2; ++y) {
            for (int a : pm) {
                for (int b : pm) probs.push_back(a * b == correlation_signs[2 * x + y] ? Rational(1, 2) : Rational(0));
            }
        }
    }
    return BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, std::move(probs));
}

/// The eight PR boxes, ordered by their correlation-sign pattern.
inline std::vector<BehaviorTable> enumerate_pr_boxes() {
    std::vector<BehaviorTable> out;
    for (unsigned pattern = 0; pattern < 16; ++pattern) {
        if (std::popcount(pattern) % 2 == 0) continue;  // pattern bits mark anticorrelated pairs
        std::array<int, 4> signs{};
        for (std::size_t k = 0; k < 4; ++k) signs[k] = (pattern >> k) & 1U ? -1 : 1;
        out.push_back(pr_box(signs));
    }
    return out;
}

/// Membership in the eight PR boxes, up to setting labels.
inline bool is_pr_box(const BehaviorTable& t) {
    detail::require_chsh_shape(t);
    const std::vector<int> pm{1, -1};
    if (t.outcomes(0) != pm || t.outcomes(1) != pm) {
        // Normalize outcome order to (+1, -1) before comparing.
        std::vector<Rational> probs;
        auto index = [](const std::vector<int>& labels, int v) {
            return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), v) - labels.begin());
        };
        for (std::size_t x = 0; x < 2; ++x) {
            for (std::size_t y = 0; y < 2; ++y) {
                for (int a : pm) {
                    for (int b : pm) probs.push_back(t.p(x, y, index(t.outcomes(0), a), index(t.outcomes(1), b)));
                }
            }
        }
        return is_pr_box(BehaviorTable({{"a", "a'"}, {"b", "b'"}}, {pm, pm}, std::move(probs)));
    }
    for (const auto& box : enumerate_pr_boxes()) {
        if (box.probabilities() == t.probabilities()) return true;
    }
    return false;
}

}  // namespace orthobox
