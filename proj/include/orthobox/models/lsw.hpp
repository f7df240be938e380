#pragma once

#include <array>
#include <string>

#include "../rational.hpp"
#include "query.hpp"

namespace orthobox {

/// Collapse boxes in the style of Liang, Spekkens and Wiseman, extended to
/// two parties.
///
/// Nothing is decided until the first box is opened anywhere. That box comes
/// out full or empty with probability 1/2, and both sides collapse to the
/// vector where it holds that value and the other two boxes hold the
/// opposite. Afterwards each side reads its own vector; opening box X with
/// content v re-collapses that side only, giving its other boxes content not-v.
/// A pair query opens its two boxes one after the other in written order.
class LswModel {
public:
    struct State {
        bool collapsed = false;
        std::array<std::array<bool, 3>, 2> full{};
    };

    std::string name() const { return "lsw"; }

    State initial_state() const { return {}; }

    bool admits(const Query&) const { return true; }

    template <BranchChooser Chooser>
    Outcome measure(State& st, const Query& q, Chooser& chooser) const {
        const bool first = open(st, q.side, q.first, chooser);
        if (!q.is_pair()) return Outcome(first);
        return Outcome(first, open(st, q.side, *q.second, chooser));
    }

private:
    template <BranchChooser Chooser>
    static bool open(State& st, Side side, Box x, Chooser& chooser) {
        if (!st.collapsed) {
            const bool v = draw_bool(chooser, Rational(1, 2));
            for (auto& vec : st.full) set_around(vec, x, v);
            st.collapsed = true;
            return v;
        }
        auto& vec = st.full[index(side)];
        const bool v = vec[index(x)];
        set_around(vec, x, v);
        return v;
    }

    static void set_around(std::array<bool, 3>& vec, Box x, bool v) {
        for (Box b : all_boxes) vec[index(b)] = b == x ? v : !v;
    }
};

}  // namespace orthobox
