#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace ratdense {

using BigInt = boost::multiprecision::cpp_int;

/// num / den as a double, accurate to a few ulps even when both exceed the double range.
double big_ratio(const BigInt& num, const BigInt& den);

} // namespace ratdense
