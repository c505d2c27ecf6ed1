#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace qmarg {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// binom(n, k) with the convention binom(n, k) = 0 for k < 0 or k > n.
inline BigInt binom(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (long i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

inline BigInt ipow(long base, long exp) {
    BigInt r = 1;
    for (long i = 0; i < exp; ++i) r *= base;
    return r;
}

/// base^exp for possibly negative exponents.
inline Rational rpow(long base, long exp) {
    if (exp >= 0) return Rational(ipow(base, exp));
    return Rational(BigInt(1), ipow(base, -exp));
}

inline BigInt factorial(long n) {
    BigInt r = 1;
    for (long i = 2; i <= n; ++i) r *= i;
    return r;
}

/// "num/den" (or "num" when the denominator is one).
inline std::string to_fraction(const Rational& q) {
    auto num = boost::multiprecision::numerator(q);
    auto den = boost::multiprecision::denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Parses "num/den" or an integer literal.
Rational parse_fraction(const std::string& text);

inline int sign(const Rational& q) { return q.sign(); }

} // namespace qmarg
