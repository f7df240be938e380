#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "../rational.hpp"
#include "query.hpp"

namespace orthobox {

/// Retrocausal seer boxes: three boxes per side, filled by a father who
/// knows which boxes will be opened.
///
/// Contents are resolved lazily. A box opened on a side gets
///  - the content of the same box on the other side, if that one is open;
///  - otherwise, if it is the second box opened on its side, a draw from the
///    pair conditionals given the first box (full forces empty; empty gives
///    full with probability p_x / (1 - p_y));
///  - otherwise, if the other side has opened boxes, the same conditionals
///    applied to the earliest box opened over there;
///  - otherwise a fresh draw with its marginal p_x.
/// A third box on a side is only tied to the other side. When the forced
/// content contradicts the local pair, the session throws InconsistentHistory.
class SeerModel {
public:
    /// Replaces p(X = 1 | Y = 0) for a local pair (X, Y) by `alpha` when the
    /// other side found box `k` full and by `beta` when it found k empty.
    struct ConditionalOverride {
        Box i = Box::A;
        Box j = Box::B;
        Box k = Box::C;
        Rational alpha;
        Rational beta;
    };

    struct State {
        std::array<std::array<signed char, 3>, 2> content{{{-1, -1, -1}, {-1, -1, -1}}};
        std::array<std::vector<Box>, 2> opened;
    };

    SeerModel() : SeerModel(Rational(1, 2), Rational(1, 2), Rational(1, 2)) {}

    SeerModel(Rational pa, Rational pb, Rational pc) : p_{std::move(pa), std::move(pb), std::move(pc)} {
        for (std::size_t x = 0; x < 3; ++x) {
            if (p_[x] <= 0 || p_[x] >= 1) throw PreconditionError("seer marginals must lie strictly between 0 and 1");
            for (std::size_t y = x + 1; y < 3; ++y) {
                if (p_[x] + p_[y] > 1) throw PreconditionError("seer marginals of a pair must sum to at most 1");
            }
        }
        for (std::size_t x = 0; x < 3; ++x) {
            for (std::size_t y = 0; y < 3; ++y) given_empty_[x][y] = p_[x] / (1 - p_[y]);
        }
    }

    SeerModel with_override(ConditionalOverride o) const {
        if (o.i == o.j || o.j == o.k || o.i == o.k) throw PreconditionError("override boxes must be distinct");
        if (o.alpha < 0 || o.alpha > 1 || o.beta < 0 || o.beta > 1) throw PreconditionError("override values must be probabilities");
        SeerModel copy = *this;
        copy.override_ = std::move(o);
        return copy;
    }

    std::string name() const { return "seer"; }
    const Rational& marginal(Box b) const { return p_[index(b)]; }

    State initial_state() const { return {}; }

    bool admits(const Query&) const { return true; }

    template <BranchChooser Chooser>
    Outcome measure(State& st, const Query& q, Chooser& chooser) const {
        if (!q.is_pair()) return Outcome(resolve(st, q.side, q.first, chooser));
        // Boxes already open on the other side are pinned first; the pair
        // constraint then fixes the partner.
        const Box x = q.first;
        const Box y = *q.second;
        const bool y_pinned = st.content[index(other(q.side))][index(y)] >= 0 &&
                              st.content[index(other(q.side))][index(x)] < 0;
        if (y_pinned) {
            const bool vy = resolve(st, q.side, y, chooser);
            const bool vx = resolve(st, q.side, x, chooser);
            return Outcome(vx, vy);
        }
        const bool vx = resolve(st, q.side, x, chooser);
        const bool vy = resolve(st, q.side, y, chooser);
        return Outcome(vx, vy);
    }

private:
    /// p(X = 1 | Y = 0) for a local pair on `side`.
    const Rational& one_given_empty(const State& st, Side side, Box x, Box y) const {
        if (override_ && override_->i == x && override_->j == y) {
            const signed char k = st.content[index(other(side))][index(override_->k)];
            if (k >= 0) return k == 1 ? override_->alpha : override_->beta;
        }
        return given_empty_[index(x)][index(y)];
    }

    template <BranchChooser Chooser>
    bool resolve(State& st, Side side, Box x, Chooser& chooser) const {
        auto& mine = st.content[index(side)];
        if (mine[index(x)] >= 0) return mine[index(x)] == 1;
        const auto& theirs = st.content[index(other(side))];
        const auto& opened = st.opened[index(side)];
        const signed char pin = theirs[index(x)];

        bool value = false;
        if (opened.size() == 1) {
            const Box y = opened.front();
            const bool y_full = mine[index(y)] == 1;
            const Rational& q = y_full ? zero_ : one_given_empty(st, side, x, y);
            if (pin >= 0) {
                const Rational chance = pin == 1 ? q : 1 - q;
                if (chance == 0) {
                    throw InconsistentHistory(side_name(side) + " box " + box_letter(x) + " must be " +
                                              (pin == 1 ? "full" : "empty") + " to match the other side, but " +
                                              side_name(side) + " box " + box_letter(y) + " was found " +
                                              (y_full ? "full" : "empty"));
                }
                value = pin == 1;
            } else {
                value = draw_bool(chooser, q);
            }
        } else if (pin >= 0) {
            value = pin == 1;
        } else if (opened.empty() && !st.opened[index(other(side))].empty()) {
            const Box y = st.opened[index(other(side))].front();
            const bool y_full = theirs[index(y)] == 1;
            value = !y_full && draw_bool(chooser, given_empty_[index(x)][index(y)]);
        } else {
            value = draw_bool(chooser, p_[index(x)]);
        }
        mine[index(x)] = value ? 1 : 0;
        st.opened[index(side)].push_back(x);
        return value;
    }

    std::array<Rational, 3> p_;
    /// p_x / (1 - p_y), the chance that x is full given that y is empty.
    std::array<std::array<Rational, 3>, 3> given_empty_;
    Rational zero_ = 0;
    std::optional<ConditionalOverride> override_;
};

}  // namespace orthobox
