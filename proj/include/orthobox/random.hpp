#pragma once

#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>

#include "errors.hpp"
#include "rational.hpp"

namespace orthobox {

/// Seeded source of randomness for every sampled run.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. A draw is a raw 64-bit word u, read as the dyadic rational
/// u / 2^64, and compared exactly against cumulative rational weights, so the
/// branch picked for a given seed does not depend on the platform or on any
/// library distribution.
class Generator {
public:
    static constexpr std::uint64_t default_seed = 0;

    explicit Generator(std::uint64_t seed = default_seed) : engine_(seed) {}

    std::uint64_t next_word() { return engine_(); }

    /// Index i with probability weights[i] / sum(weights). Zero weights are never picked.
    std::size_t pick(std::span<const Rational> weights) {
        Rational total = 0;
        for (const auto& w : weights) {
            if (w < 0) throw PreconditionError("negative branch weight");
            total += w;
        }
        if (total == 0) throw PreconditionError("all branch weights are zero");
        if (auto i = pick_small(weights)) return *i;
        const Rational u = Rational(Integer(next_word()), two_to_64()) * total;
        Rational cumulative = 0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] == 0) continue;
            last_positive = i;
            cumulative += weights[i];
            if (u < cumulative) return i;
        }
        return last_positive;
    }

    /// Same draw as pick({1 - q, q}) == 1 for 0 < q < 1, without rational arithmetic
    /// when the denominator of q fits: u / 2^64 >= 1 - q  <=>  u * den >= (den - num) * 2^64.
    bool bernoulli(const Rational& q) {
        const Integer& den = boost::multiprecision::denominator(q);
        const Integer& num = boost::multiprecision::numerator(q);
        if (q <= 0 || q >= 1 || den >= (std::uint64_t{1} << 62)) {
            const std::array<Rational, 2> w{1 - q, q};
            return pick(w) == 1;
        }
        const auto d = den.convert_to<std::uint64_t>();
        const auto n = num.convert_to<std::uint64_t>();
        const unsigned __int128 lhs = static_cast<unsigned __int128>(next_word()) * d;
        return lhs >= (static_cast<unsigned __int128>(d - n) << 64);
    }

    /// Uniform index in [0, n).
    std::size_t pick_uniform(std::size_t n) {
        if (n == 0) throw PreconditionError("pick_uniform over an empty range");
        // multiply-shift; bias is below n / 2^64
        const auto wide = static_cast<unsigned __int128>(next_word()) * n;
        return static_cast<std::size_t>(wide >> 64);
    }

private:
    /// Same comparison as the rational path, done in 128-bit integers when the
    /// weights share a common denominator D with sum(weights) * D below 2^62:
    /// u / 2^64 * S / D < C / D  <=>  u * S < C * 2^64.
    std::optional<std::size_t> pick_small(std::span<const Rational> weights) {
        constexpr std::uint64_t limit = std::uint64_t{1} << 62;
        std::uint64_t d = 1;
        for (const auto& w : weights) {
            const Integer& den = boost::multiprecision::denominator(w);
            if (den >= limit) return std::nullopt;
            const auto wd = den.convert_to<std::uint64_t>();
            const std::uint64_t l = d / std::gcd(d, wd) * wd;
            if (l >= limit || l < d) return std::nullopt;
            d = l;
        }
        std::array<std::uint64_t, 8> scaled{};
        if (weights.size() > scaled.size()) return std::nullopt;
        unsigned __int128 sum = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const Integer n = boost::multiprecision::numerator(weights[i]) * (d / boost::multiprecision::denominator(weights[i]).convert_to<std::uint64_t>());
            if (n >= limit) return std::nullopt;
            scaled[i] = n.convert_to<std::uint64_t>();
            sum += scaled[i];
            if (sum >= limit) return std::nullopt;
        }
        const auto s = static_cast<std::uint64_t>(sum);
        const unsigned __int128 u = static_cast<unsigned __int128>(next_word()) * s;
        unsigned __int128 cumulative = 0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (scaled[i] == 0) continue;
            last_positive = i;
            cumulative += scaled[i];
            if (u < (cumulative << 64)) return i;
        }
        return last_positive;
    }

    static const Integer& two_to_64() {
        static const Integer value = Integer(1) << 64;
        return value;
    }

    std::mt19937_64 engine_;
};

}  // namespace orthobox
