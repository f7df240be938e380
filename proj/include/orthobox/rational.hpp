#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace orthobox {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw PreconditionError("zero denominator");
    return Rational(num, den);
}

/// Parses "num/den", a plain integer, or a finite decimal such as "0.25" (read
/// exactly). Whitespace around the tokens is ignored.
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    auto parse_int = [&](std::string_view s) -> Integer {
        s = trim(s);
        if (s.empty()) throw ParseError("empty number in rational '" + std::string(text) + "'", 0);
        std::string_view digits = s;
        if (digits.front() == '+' || digits.front() == '-') digits.remove_prefix(1);
        if (digits.empty()) throw ParseError("malformed rational '" + std::string(text) + "'", 0);
        for (char c : digits) {
            if (c < '0' || c > '9') throw ParseError("malformed rational '" + std::string(text) + "'", 0);
        }
        const Integer value{std::string(digits)};
        return s.front() == '-' ? Integer(-value) : value;
    };
    const auto slash = text.find('/');
    if (const auto dot = text.find('.'); dot != std::string_view::npos && slash == std::string_view::npos) {
        const std::string_view whole = trim(text.substr(0, dot));
        const std::string_view frac = trim(text.substr(dot + 1));
        if (frac.empty() || frac.front() == '+' || frac.front() == '-') {
            throw ParseError("malformed rational '" + std::string(text) + "'", 0);
        }
        const bool negative = !whole.empty() && whole.front() == '-';
        const bool bare = whole.empty() || whole == "-" || whole == "+";
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const Integer int_part = bare ? Integer(0) : parse_int(whole);
        const Integer frac_part = parse_int(frac);
        const Integer magnitude = (int_part < 0 ? Integer(-int_part) : int_part) * scale + frac_part;
        return Rational(negative ? Integer(-magnitude) : magnitude, scale);
    }
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    Integer num = parse_int(text.substr(0, slash));
    Integer den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'", 0);
    return Rational(num, den);
}

/// Machine rendering, always "num/den" (e.g. "0/1", "3/8").
inline std::string to_fraction(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" + boost::multiprecision::denominator(r).str();
}

/// Human rendering: decimal with `digits` significant digits.
inline std::string to_decimal(const Rational& r, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, r.convert_to<double>());
    return buf;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace orthobox
