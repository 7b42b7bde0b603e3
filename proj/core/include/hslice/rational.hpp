#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace hslice {

using Rational = mpq_class;

// Accepts "p", "-p", or "p/q" (base 10). Throws std::invalid_argument on junk.
inline Rational parse_rational(const std::string& text) {
    size_t first = text.find_first_not_of(" \t");
    size_t last = text.find_last_not_of(" \t");
    if (first == std::string::npos) throw std::invalid_argument("empty rational literal");
    std::string trimmed = text.substr(first, last - first + 1);
    mpq_class q;
    if (mpq_set_str(q.get_mpq_t(), trimmed.c_str(), 10) != 0)
        throw std::invalid_argument("bad rational literal: '" + text + "'");
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

// Every finite double is exactly representable as a rational.
inline Rational rational_from_double(double x) {
    if (!(x == x) || x > 1.7976931348623157e308 || x < -1.7976931348623157e308)
        throw std::invalid_argument("non-finite value has no rational form");
    return Rational(x);
}

inline int sign_of(const Rational& q) { return sgn(q); }

}  // namespace hslice
