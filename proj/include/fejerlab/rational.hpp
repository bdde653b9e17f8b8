#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace fejerlab {

// Arbitrary-precision integers and rationals. cpp_rational keeps values in
// canonical form (gcd-reduced, positive denominator), which is exactly the
// representation contract the exact layer needs.
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// "num/den" with the canonical positive denominator; integers render
/// without the "/1".
[[nodiscard]] std::string to_fraction_string(const BigRational& q);

/// Natural log of a positive big integer. Values beyond double range are
/// handled through the bit length and the top 53 bits of the mantissa.
[[nodiscard]] double log_big(const BigInt& x);

} // namespace fejerlab
