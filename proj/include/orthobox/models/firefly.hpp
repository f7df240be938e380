#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include "../errors.hpp"
#include "../rational.hpp"
#include "query.hpp"

namespace orthobox {

enum class FireflyFlavor : std::uint8_t { mirror, alice_cuts_bob_local, alice_cuts_bob_mirror };

inline std::string flavor_name(FireflyFlavor f) {
    switch (f) {
        case FireflyFlavor::mirror: return "mirror";
        case FireflyFlavor::alice_cuts_bob_local: return "alice_cuts_bob_local";
        case FireflyFlavor::alice_cuts_bob_mirror: return "alice_cuts_bob_mirror";
    }
    return "?";
}

inline FireflyFlavor parse_flavor(std::string_view text) {
    if (text == "mirror") return FireflyFlavor::mirror;
    if (text == "alice_cuts_bob_local") return FireflyFlavor::alice_cuts_bob_local;
    if (text == "alice_cuts_bob_mirror") return FireflyFlavor::alice_cuts_bob_mirror;
    throw PreconditionError("unknown firefly flavor '" + std::string(text) +
                            "' (expected mirror, alice_cuts_bob_local or alice_cuts_bob_mirror)");
}

/// Triangle geometry shared by all firefly flavors.
///
/// Corners A, B, C sit at perimeter coordinates 0, 1, 2 (perimeter 3); side
/// s runs from corner s to corner s+1, so AB = 0, BC = 1, CA = 2. The six
/// half-sides are numbered h = 0..5 with midpoint (2h + 1) / 4; half 2s is
/// the half of side s touching its first corner.
namespace firefly_geometry {

inline int side_of(const Query& q) { return static_cast<int>(index(q.first)); }
inline Box first_corner(int side) { return all_boxes[static_cast<std::size_t>(side)]; }
inline Box second_corner(int side) { return all_boxes[static_cast<std::size_t>((side + 1) % 3)]; }

/// Perimeter distance in quarter units from the midpoint of `half` to `corner`.
inline int distance(int half, Box corner) {
    const int d = std::abs((2 * half + 1) - 4 * static_cast<int>(index(corner)));
    return std::min(d, 12 - d);
}

/// Corner of `side` nearest to the midpoint of `half`; ties cannot occur.
inline Box nearest_corner(int half, int side) {
    const Box a = first_corner(side);
    const Box b = second_corner(side);
    return distance(half, a) < distance(half, b) ? a : b;
}

inline int half_of(int side, Box corner) { return 2 * side + (first_corner(side) == corner ? 0 : 1); }

/// The side through `corner` other than `side`.
inline int other_side_through(Box corner, int side) {
    const int c = static_cast<int>(index(corner));
    const int before = (c + 2) % 3;  // side ending at the corner
    return before == side ? c : before;
}

/// Half reached by "cutting the nearest corner": the corner's half on the
/// other side through it.
inline int cut_corner(int side, Box corner) { return half_of(other_side_through(corner, side), corner); }

}  // namespace firefly_geometry

/// Entangled firefly boxes. Each side's box holds a firefly on one of six
/// half-sides; both start on one shared half, uniform over the six.
///
/// Observing a side (a pair query) lights the corner nearest to the
/// firefly; the firefly settles next to that corner on the observed side, or
/// in the cutting flavors moves on to the corner's half of the adjacent side.
/// The first observation anywhere also places the partner firefly on the
/// cut-corner half. In alice_cuts_bob_mirror every later observation by Alice
/// drags Bob's firefly along as well.
///
/// The mirror flavor admits only pair queries. The cutting flavors also read
/// single corners through a fixed context: A through AB, B through BC, C
/// through CA.
class FireflyModel {
public:
    struct State {
        std::array<signed char, 2> half{-1, -1};
        bool linked = true;
    };

    explicit FireflyModel(FireflyFlavor flavor = FireflyFlavor::mirror) : flavor_(flavor) {}

    std::string name() const {
        return flavor_ == FireflyFlavor::mirror ? "firefly" : "firefly-" + flavor_name(flavor_);
    }
    FireflyFlavor flavor() const { return flavor_; }

    State initial_state() const { return {}; }

    bool admits(const Query& q) const { return q.is_pair() || flavor_ != FireflyFlavor::mirror; }

    /// In the cutting flavors only the fixed context measures a corner, so
    /// CA is a measurement of C but not of A.
    bool measures(const Query& q, Box x) const {
        if (!q.contains(x)) return false;
        if (flavor_ == FireflyFlavor::mirror || !q.is_pair()) return true;
        return q.first == x;
    }

    template <BranchChooser Chooser>
    Outcome measure(State& st, const Query& q, Chooser& chooser) const {
        using namespace firefly_geometry;
        if (!admits(q)) {
            throw InadmissibleQuery(std::string("firefly corner ") + box_letter(q.first) +
                                    " cannot be observed on its own; query a side (AB, BC or CA)");
        }
        if (st.half[0] < 0) {
            static const std::array<Rational, 6> uniform{1, 1, 1, 1, 1, 1};
            const auto h = static_cast<signed char>(chooser.choose(uniform));
            st.half = {h, h};
        }
        const int side = q.is_pair() ? side_of(q) : context_side(q.first);
        const std::size_t me = index(q.side);
        const std::size_t partner = index(other(q.side));
        const Box glow = nearest_corner(st.half[me], side);

        const bool cuts = flavor_ != FireflyFlavor::mirror;
        st.half[me] = static_cast<signed char>(cuts ? cut_corner(side, glow) : half_of(side, glow));
        if (st.linked) {
            st.half[partner] = static_cast<signed char>(cut_corner(side, glow));
            st.linked = false;
        } else if (flavor_ == FireflyFlavor::alice_cuts_bob_mirror && q.side == Side::alice) {
            st.half[partner] = st.half[me];
        }

        if (!q.is_pair()) return Outcome(glow == q.first);
        return Outcome(glow == q.first, glow == *q.second);
    }

private:
    static int context_side(Box b) { return static_cast<int>(index(b)); }

    FireflyFlavor flavor_;
};

}  // namespace orthobox
