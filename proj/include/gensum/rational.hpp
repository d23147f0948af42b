#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace gensum {

// Exact decay exponents. Phase boundaries (h-1)/h must be decidable, so
// delta never travels as a double.
using Rational = boost::rational<std::int64_t>;

// Parses "p/q" or an integer "p". Throws ConfigError on malformed input,
// zero denominators, or decimal notation.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace gensum
