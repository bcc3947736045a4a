#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ordertope {

using Integer = mpz_class;
using Rational = mpq_class;
using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses "12", "-0.375", "1.5e-3" or "7/20" into an exact rational.
Rational parse_rational(std::string_view text);

// Terminating decimals are written as decimals ("0.125"), everything else as
// a reduced fraction ("1/3"). parse_rational() reads both back exactly.
std::string to_exact_string(const Rational& value);

// Decimal rendering rounded half away from zero to `places` digits.
std::string to_fixed_string(const Rational& value, int places);

inline double to_double(const Rational& value) { return value.get_d(); }

Rational dot(const RationalVector& a, const RationalVector& b);

// Smallest positive integer L such that L * v is integral.
Integer common_denominator(const RationalVector& v);

// Scales v to the primitive integer vector with the same direction.
IntegerVector primitive_integer_vector(const RationalVector& v);

}  // namespace ordertope
