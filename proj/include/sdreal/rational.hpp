#ifndef SDREAL_RATIONAL_HPP
#define SDREAL_RATIONAL_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace sdreal {

/// Exact rational number. GMP keeps every result in lowest terms with a
/// positive denominator, so structural equality is numeric equality.
using Rational = mpq_class;
using Integer = mpz_class;

/// Raised when an argument lies outside the domain an operation accepts
/// (e.g. a point outside [-1,1] or coefficients whose function leaves I).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// 2^e for any signed exponent.
Rational pow2(long e);

/// `p/q` in lowest terms, or `p` when the denominator is 1.
std::string to_string(const Rational& q);

/// Parses `[-+]digits`, `[-+]digits/digits` or a decimal literal such as
/// `-0.75`. Decimals convert exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Correctly rounded (half away from zero) decimal with `digits` fractional
/// digits.
std::string to_decimal(const Rational& q, int digits);

/// |q| <= 1
inline bool in_unit_interval(const Rational& q) { return abs(q) <= 1; }

/// Hash combining numerator and denominator limbs.
std::size_t hash_value(const Rational& q);

}  // namespace sdreal

#endif  // SDREAL_RATIONAL_HPP
