#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace tropical {

/// Exact rational scalar used for ε-orders and renormalization exponents.
using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

/// Accepts "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

bool is_integer(const Rational& r);

}  // namespace tropical
