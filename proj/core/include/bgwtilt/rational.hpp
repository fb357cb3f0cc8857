#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace bgwtilt {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Parses "p/q", plain integers, or decimal strings ("0.5", "-1.25e2").
/// Decimal strings convert exactly (base-10 digits, not binary floats).
Rational parse_rational(const std::string& text);

std::string format_rational(const Rational& q);

/// n! as an exact integer.
Integer factorial(unsigned n);

} // namespace bgwtilt
