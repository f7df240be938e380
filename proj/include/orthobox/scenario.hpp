#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace orthobox {

/// Bit i set <=> proposition i belongs to the set.
using PropSet = std::uint32_t;

inline int cardinality(PropSet s) { return std::popcount(s); }
inline bool is_subset(PropSet sub, PropSet super) { return (sub & ~super) == 0; }

/// Propositions together with the family of jointly orthogonal subsets.
///
/// The family is kept as the antichain of its maximal members; every subset
/// of a stored set (including the empty set and all singletons) is joint.
class OrthoScenario {
public:
    static constexpr std::size_t max_propositions = 20;

    OrthoScenario(std::vector<std::string> propositions,
                  const std::vector<std::vector<std::string>>& joint_sets)
        : labels_(std::move(propositions)) {
        check_labels();
        std::vector<PropSet> sets;
        sets.reserve(joint_sets.size());
        for (const auto& members : joint_sets) sets.push_back(mask_of(members));
        set_family(std::move(sets));
    }

    static OrthoScenario from_masks(std::vector<std::string> propositions, std::vector<PropSet> joint_sets) {
        OrthoScenario s(std::move(propositions));
        const PropSet all = s.universe();
        for (PropSet m : joint_sets) {
            if (!is_subset(m, all)) throw PreconditionError("joint set refers to an unknown proposition");
        }
        s.set_family(std::move(joint_sets));
        return s;
    }

    /// Builds a scenario from an explicit (not necessarily maximal) family and
    /// rejects it unless the family is downward closed.
    static OrthoScenario from_closed_family(std::vector<std::string> propositions,
                                            const std::vector<std::vector<std::string>>& family) {
        OrthoScenario s(std::move(propositions));
        std::vector<PropSet> masks;
        for (const auto& members : family) masks.push_back(s.mask_of(members));
        std::sort(masks.begin(), masks.end());
        auto present = [&](PropSet m) {
            return cardinality(m) <= 1 || std::binary_search(masks.begin(), masks.end(), m);
        };
        for (PropSet m : masks) {
            for (PropSet rest = m; rest != 0; rest &= rest - 1) {
                const PropSet sub = m & ~(rest & -rest);
                if (!present(sub)) {
                    throw PreconditionError("joint_sets is not downward closed: " + s.describe(m) +
                                            " is listed but its subset " + s.describe(sub) + " is not");
                }
            }
        }
        s.set_family(std::move(masks));
        return s;
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    PropSet universe() const noexcept { return size() == 32 ? ~PropSet{0} : (PropSet{1} << size()) - 1; }

    /// Maximal jointly orthogonal sets, sorted by mask value.
    const std::vector<PropSet>& maximal_sets() const noexcept { return maximal_; }

    bool is_joint(PropSet m) const {
        if (cardinality(m) <= 1) return is_subset(m, universe());
        return std::any_of(maximal_.begin(), maximal_.end(), [m](PropSet s) { return is_subset(m, s); });
    }

    std::optional<std::size_t> index_of(const std::string& label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels_.begin());
    }

    PropSet mask_of(const std::vector<std::string>& members) const {
        PropSet m = 0;
        for (const auto& l : members) {
            auto i = index_of(l);
            if (!i) throw PreconditionError("unknown proposition '" + l + "'");
            if (m & (PropSet{1} << *i)) throw PreconditionError("proposition '" + l + "' repeated in a set");
            m |= PropSet{1} << *i;
        }
        return m;
    }

    /// Member labels in scenario order.
    std::vector<std::string> labels_of(PropSet m) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < size(); ++i) {
            if (m & (PropSet{1} << i)) out.push_back(labels_[i]);
        }
        return out;
    }

    std::string describe(PropSet m) const {
        std::string out = "{";
        bool first = true;
        for (const auto& l : labels_of(m)) {
            if (!first) out += ",";
            out += l;
            first = false;
        }
        return out + "}";
    }

    friend bool operator==(const OrthoScenario&, const OrthoScenario&) = default;

private:
    explicit OrthoScenario(std::vector<std::string> propositions) : labels_(std::move(propositions)) {
        check_labels();
    }

    void check_labels() const {
        if (labels_.empty()) throw PreconditionError("a scenario needs at least one proposition");
        if (labels_.size() > max_propositions) {
            throw PreconditionError("at most " + std::to_string(max_propositions) + " propositions are supported");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i].empty()) throw PreconditionError("empty proposition label");
            for (std::size_t j = 0; j < i; ++j) {
                if (labels_[i] == labels_[j]) throw PreconditionError("duplicate proposition '" + labels_[i] + "'");
            }
        }
    }

    void set_family(std::vector<PropSet> sets) {
        for (std::size_t i = 0; i < size(); ++i) sets.push_back(PropSet{1} << i);
        std::sort(sets.begin(), sets.end());
        sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
        maximal_.clear();
        for (PropSet s : sets) {
            const bool dominated = std::any_of(sets.begin(), sets.end(),
                                               [s](PropSet t) { return t != s && is_subset(s, t); });
            if (!dominated) maximal_.push_back(s);
        }
    }

    std::vector<std::string> labels_;
    std::vector<PropSet> maximal_;
};

/// 1-skeleton of the joint-orthogonality complex.
struct OrthoGraph {
    std::vector<std::string> labels;
    std::vector<PropSet> adjacency;  // adjacency[i] has bit j iff {i,j} is an edge

    std::size_t size() const noexcept { return labels.size(); }

    bool adjacent(std::size_t i, std::size_t j) const { return (adjacency.at(i) >> j) & 1U; }

    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < size(); ++i) {
            for (std::size_t j = i + 1; j < size(); ++j) {
                if (adjacent(i, j)) out.emplace_back(i, j);
            }
        }
        return out;
    }

    bool is_clique(PropSet m) const {
        for (PropSet rest = m; rest != 0; rest &= rest - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(rest));
            if (!is_subset(m & ~(PropSet{1} << i), adjacency[i])) return false;
        }
        return true;
    }

    /// No two members adjacent.
    bool is_independent(PropSet m) const {
        for (PropSet rest = m; rest != 0; rest &= rest - 1) {
            const auto i = static_cast<std::size_t>(std::countr_zero(rest));
            if (m & adjacency[i]) return false;
        }
        return true;
    }

    /// All nonempty cliques, in increasing mask order.
    std::vector<PropSet> cliques() const {
        std::vector<PropSet> out;
        const PropSet all = (PropSet{1} << size()) - 1;
        for (PropSet m = 1; m <= all && m != 0; ++m) {
            if (is_clique(m)) out.push_back(m);
        }
        return out;
    }

    static OrthoGraph from_edges(std::vector<std::string> labels,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
        OrthoGraph g{std::move(labels), {}};
        g.adjacency.assign(g.size(), 0);
        for (auto [i, j] : edges) {
            if (i == j || i >= g.size() || j >= g.size()) throw PreconditionError("bad edge");
            g.adjacency[i] |= PropSet{1} << j;
            g.adjacency[j] |= PropSet{1} << i;
        }
        return g;
    }
};

inline OrthoGraph orthogonality_graph(const OrthoScenario& s) {
    OrthoGraph g{s.labels(), std::vector<PropSet>(s.size(), 0)};
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (s.is_joint((PropSet{1} << i) | (PropSet{1} << j))) {
                g.adjacency[i] |= PropSet{1} << j;
                g.adjacency[j] |= PropSet{1} << i;
            }
        }
    }
    return g;
}

/// Specker's principle: every pairwise orthogonal set is jointly orthogonal,
/// i.e. the joint family is the clique complex of the orthogonality graph.
inline bool is_specker(const OrthoScenario& s) {
    const OrthoGraph g = orthogonality_graph(s);
    const PropSet all = s.universe();
    for (PropSet m = 1; m <= all && m != 0; ++m) {
        if (cardinality(m) >= 3 && g.is_clique(m) && !s.is_joint(m)) return false;
    }
    return true;
}

namespace detail {

inline bool label_order(const OrthoScenario& s, PropSet a, PropSet b) {
    if (cardinality(a) != cardinality(b)) return cardinality(a) < cardinality(b);
    auto la = s.labels_of(a);
    auto lb = s.labels_of(b);
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    return la < lb;
}

}  // namespace detail

/// Pairwise orthogonal, not joint, every proper subset joint.
inline bool is_minimal_non_specker(const OrthoScenario& s, PropSet m) {
    if (cardinality(m) < 2 || !is_subset(m, s.universe())) return false;
    if (!orthogonality_graph(s).is_clique(m) || s.is_joint(m)) return false;
    for (PropSet rest = m; rest != 0; rest &= rest - 1) {
        if (!s.is_joint(m & ~(rest & -rest))) return false;
    }
    return true;
}

/// Every minimal non-Specker set, smallest first, ties broken by the sorted label sequence.
inline std::vector<PropSet> all_minimal_non_specker(const OrthoScenario& s) {
    const OrthoGraph g = orthogonality_graph(s);
    std::vector<PropSet> found;
    const PropSet all = s.universe();
    for (PropSet m = 1; m <= all && m != 0; ++m) {
        if (cardinality(m) < 3 || !g.is_clique(m) || s.is_joint(m)) continue;
        bool minimal = true;
        for (PropSet rest = m; rest != 0 && minimal; rest &= rest - 1) {
            minimal = s.is_joint(m & ~(rest & -rest));
        }
        if (minimal) found.push_back(m);
    }
    std::sort(found.begin(), found.end(), [&](PropSet a, PropSet b) { return detail::label_order(s, a, b); });
    return found;
}

inline std::optional<PropSet> find_minimal_non_specker(const OrthoScenario& s) {
    auto all = all_minimal_non_specker(s);
    if (all.empty()) return std::nullopt;
    return all.front();
}

/// Marginal probabilities p_i, aligned with the scenario's proposition order.
class MarginalVector {
public:
    MarginalVector() = default;
    explicit MarginalVector(std::vector<Rational> values) : values_(std::move(values)) {
        for (const auto& p : values_) {
            if (p < 0 || p > 1) throw PreconditionError("marginal " + to_fraction(p) + " outside [0,1]");
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    const Rational& operator[](std::size_t i) const { return values_.at(i); }
    const std::vector<Rational>& values() const noexcept { return values_; }

    Rational sum_over(PropSet m) const {
        Rational total = 0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (m & (PropSet{1} << i)) total += values_[i];
        }
        return total;
    }

    /// Checks size and p_i + p_j <= 1 on every orthogonal pair.
    void validate(const OrthoScenario& s) const {
        if (values_.size() != s.size()) {
            throw PreconditionError("expected " + std::to_string(s.size()) + " marginals, got " +
                                    std::to_string(values_.size()));
        }
        const OrthoGraph g = orthogonality_graph(s);
        for (auto [i, j] : g.edges()) {
            if (values_[i] + values_[j] > 1) {
                throw PreconditionError("orthogonal pair {" + s.label(i) + "," + s.label(j) +
                                        "} has marginal sum " + to_fraction(values_[i] + values_[j]) + " > 1");
            }
        }
    }

    friend bool operator==(const MarginalVector&, const MarginalVector&) = default;

private:
    std::vector<Rational> values_;
};

/// Result of merging A_3..A_n of a minimal non-Specker set into one disjunction.
struct CoarseGrained {
    OrthoScenario scenario;
    PropSet triple;               // the three-element minimal non-Specker set in `scenario`
    std::vector<PropSet> origin;  // origin[i]: propositions of the input merged into new proposition i

    MarginalVector marginals(const MarginalVector& input) const {
        std::vector<Rational> out;
        out.reserve(origin.size());
        for (PropSet m : origin) out.push_back(input.sum_over(m));
        return MarginalVector(std::move(out));
    }
};

inline CoarseGrained coarse_grain_to_three(const OrthoScenario& s, PropSet minimal) {
    if (cardinality(minimal) < 3) throw PreconditionError("coarse graining needs a minimal set of size >= 3");
    if (!is_minimal_non_specker(s, minimal)) {
        throw PreconditionError(s.describe(minimal) + " is not a minimal non-Specker set");
    }
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (minimal & (PropSet{1} << i)) members.push_back(i);
    }
    const PropSet merged = minimal & ~((PropSet{1} << members[0]) | (PropSet{1} << members[1]));
    const std::size_t merged_at = members[2];

    std::vector<std::string> labels;
    std::vector<PropSet> origin;
    PropSet triple = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const PropSet bit = PropSet{1} << i;
        if ((merged & bit) && i != merged_at) continue;
        if (i == merged_at) {
            std::string joined;
            for (const auto& l : s.labels_of(merged)) joined += (joined.empty() ? "" : "|") + l;
            labels.push_back(joined);
            origin.push_back(merged);
        } else {
            labels.push_back(s.label(i));
            origin.push_back(bit);
        }
        if (minimal & bit) triple |= PropSet{1} << (labels.size() - 1);
    }

    std::vector<PropSet> joint;
    const PropSet all = (PropSet{1} << labels.size()) - 1;
    for (PropSet m = 1; m <= all; ++m) {
        PropSet expanded = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (m & (PropSet{1} << i)) expanded |= origin[i];
        }
        if (s.is_joint(expanded)) joint.push_back(m);
    }
    return CoarseGrained{OrthoScenario::from_masks(std::move(labels), std::move(joint)), triple, std::move(origin)};
}

}  // namespace orthobox
