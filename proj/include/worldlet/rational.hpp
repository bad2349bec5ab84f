#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace worldlet {

/// Exact arbitrary-precision rational, always kept in canonical (reduced) form.
using Rational = mpq_class;

/// Parses "p/q", "p" or a finite decimal such as "0.25" into an exact rational.
/// Throws ParseError on anything else, including a zero denominator.
Rational parse_rational(std::string_view text);

/// Formats as "p/q" with q > 0, including integers ("1/1", "0/1").
std::string format_rational(const Rational& value);

/// p/q in canonical form. The two-argument mpq_class constructor does not reduce.
inline Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
}

inline double to_double(const Rational& value) { return value.get_d(); }

}  // namespace worldlet
