#pragma once

#include <array>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "../errors.hpp"
#include "../rational.hpp"

namespace orthobox {

enum class Side : std::uint8_t { alice, bob };
enum class Box : std::uint8_t { A, B, C };

inline constexpr std::array<Box, 3> all_boxes{Box::A, Box::B, Box::C};
inline constexpr std::array<Side, 2> all_sides{Side::alice, Side::bob};

constexpr Side other(Side s) { return s == Side::alice ? Side::bob : Side::alice; }
constexpr std::size_t index(Side s) { return static_cast<std::size_t>(s); }
constexpr std::size_t index(Box b) { return static_cast<std::size_t>(b); }

inline char box_letter(Box b) { return "ABC"[index(b)]; }
inline std::string side_name(Side s) { return s == Side::alice ? "alice" : "bob"; }

inline Side parse_side(std::string_view text) {
    if (text == "alice") return Side::alice;
    if (text == "bob") return Side::bob;
    throw ParseError("unknown side '" + std::string(text) + "' (expected alice or bob)", 0);
}

/// One measurement request: a side and either a single box or one of the
/// three pair contexts AB, BC, CA. Pairs keep their written order.
struct Query {
    Side side = Side::alice;
    Box first = Box::A;
    std::optional<Box> second;

    static Query single(Side s, Box b) { return Query{s, b, std::nullopt}; }

    static Query pair(Side s, Box x, Box y) {
        const bool written = (x == Box::A && y == Box::B) || (x == Box::B && y == Box::C) || (x == Box::C && y == Box::A);
        if (!written) {
            throw PreconditionError(std::string("pair targets are AB, BC and CA; got ") + box_letter(x) + box_letter(y));
        }
        return Query{s, x, y};
    }

    bool is_pair() const { return second.has_value(); }
    std::size_t size() const { return is_pair() ? 2 : 1; }
    Box box(std::size_t i) const { return i == 0 ? first : *second; }
    bool contains(Box b) const { return first == b || (second && *second == b); }
    std::optional<std::size_t> position_of(Box b) const {
        if (first == b) return 0;
        if (second && *second == b) return 1;
        return std::nullopt;
    }

    std::string target() const {
        std::string t(1, box_letter(first));
        if (second) t += box_letter(*second);
        return t;
    }
    std::string to_string() const { return side_name(side) + " " + target(); }

    auto operator<=>(const Query&) const = default;
};

inline Query parse_query(Side side, std::string_view target) {
    auto letter = [&](char c) -> Box {
        switch (c) {
            case 'A': return Box::A;
            case 'B': return Box::B;
            case 'C': return Box::C;
            default: throw ParseError("unknown box '" + std::string(1, c) + "' in target '" + std::string(target) + "'", 0);
        }
    };
    if (target.size() == 1) return Query::single(side, letter(target[0]));
    if (target.size() == 2) {
        const Box x = letter(target[0]);
        const Box y = letter(target[1]);
        try {
            return Query::pair(side, x, y);
        } catch (const PreconditionError& e) {
            throw ParseError(e.what(), 0);
        }
    }
    throw ParseError("target '" + std::string(target) + "' must be one box or one of AB, BC, CA", 0);
}

/// Contents revealed by a query, one flag per queried box in written order.
/// true is full (seer, LSW) or glowing (firefly).
class Outcome {
public:
    Outcome() = default;
    explicit Outcome(bool v) : bits_(v ? 1 : 0), size_(1) {}
    Outcome(bool v0, bool v1) : bits_(static_cast<std::uint8_t>((v0 ? 1 : 0) | (v1 ? 2 : 0))), size_(2) {}

    std::size_t size() const { return size_; }
    bool operator[](std::size_t i) const { return ((bits_ >> i) & 1U) != 0; }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < size_; ++i) s += (*this)[i] ? '+' : '-';
        return s;
    }

    auto operator<=>(const Outcome&) const = default;

private:
    std::uint8_t bits_ = 0;
    std::uint8_t size_ = 0;
};

/// Accepts "+", "-", "+-", ... and for single boxes the words full/empty/glow/dark.
inline Outcome parse_outcome(std::string_view text) {
    if (text == "full" || text == "glow") return Outcome(true);
    if (text == "empty" || text == "dark") return Outcome(false);
    auto bit = [&](char c) {
        if (c == '+') return true;
        if (c == '-') return false;
        throw ParseError("outcome '" + std::string(text) + "' must use + and -", 0);
    };
    if (text.size() == 1) return Outcome(bit(text[0]));
    if (text.size() == 2) return Outcome(bit(text[0]), bit(text[1]));
    throw ParseError("outcome '" + std::string(text) + "' must cover one or two boxes", 0);
}

/// Source of every random decision a model makes. Implementations either draw
/// from a seeded generator or walk all branches for exact enumeration.
template <class C>
concept BranchChooser = requires(C& c, std::span<const Rational> weights) {
    { c.choose(weights) } -> std::convertible_to<std::size_t>;
};

/// Chooses between false (weight 1 - q) and true (weight q) without consulting
/// the chooser when q is 0 or 1.
template <BranchChooser Chooser>
bool draw_bool(Chooser& chooser, const Rational& q) {
    if (q == 0) return false;
    if (q == 1) return true;
    if constexpr (requires { chooser.choose_bool(q); }) {
        return chooser.choose_bool(q);
    }
    const std::array<Rational, 2> w{1 - q, q};
    return chooser.choose(w) == 1;
}

}  // namespace orthobox
