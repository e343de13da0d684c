#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fairmat/errors.hpp"

namespace fairmat {

/// Arbitrary-precision rational in canonical (lowest terms, positive
/// denominator) form. Every probability and polytope coordinate in the
/// library is one of these.
using Rational = boost::multiprecision::mpq_rational;

/// Dense vector indexed by item.
using Vector = std::vector<Rational>;

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw ParseError("zero denominator");
    return Rational(num) / Rational(den);
}

/// "p/q" for non-integers, "p" for integers (GMP canonical form).
inline std::string to_string(const Rational& r) { return r.str(); }

/// Accepts "p", "-p" and "p/q"; the result is canonicalized.
inline Rational parse_rational(std::string_view text) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    auto is_integer = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
        if (s.empty()) return false;
        for (char c : s)
            if (c < '0' || c > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    std::string_view num = slash == std::string_view::npos ? text : text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    num = trim(num);
    den = trim(den);
    if (!is_integer(num) || !is_integer(den))
        throw ParseError("not a rational: '" + std::string(text) + "'");
    using boost::multiprecision::mpz_int;
    mpz_int n(std::string(num.front() == '+' ? num.substr(1) : num));
    mpz_int d(std::string(den.front() == '+' ? den.substr(1) : den));
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
}

inline Rational sum(const Vector& v) {
    Rational s = 0;
    for (const auto& x : v) s += x;
    return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline bool is_integral(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

}  // namespace fairmat
