// Exact rational scalars used everywhere in the engine.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace jacobi {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Binomial coefficient C(n, k) for n, k >= 0; zero when k > n.
inline Int binomial(long n, long k) {
    if (k < 0 || k > n) return 0;
    Int r = 1;
    for (long t = 0; t < k; ++t) {
        r *= (n - t);
        r /= (t + 1);
    }
    return r;
}

// True when q is an integer.
inline bool is_integer(const Rational& q) {
    return boost::multiprecision::denominator(q) == 1;
}

inline long to_long(const Rational& q) {
    if (!is_integer(q)) throw std::runtime_error("rational is not an integer");
    return static_cast<long>(boost::multiprecision::numerator(q));
}

inline std::string rat_to_string(const Rational& q) {
    return q.str();
}

// Parses "p", "-p", "p/q".
inline Rational rat_from_string(const std::string& s) {
    return Rational(s);
}

// q^e for integer e (negative allowed when q != 0).
inline Rational rat_pow(const Rational& q, long e) {
    if (e == 0) return 1;
    Rational base = q;
    bool inv = e < 0;
    unsigned long n = inv ? -(unsigned long)e : (unsigned long)e;
    if (inv) {
        if (base == 0) throw std::runtime_error("division by zero in rat_pow");
        base = Rational(1) / base;
    }
    Rational r = 1;
    while (n) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
    }
    return r;
}

}  // namespace jacobi
