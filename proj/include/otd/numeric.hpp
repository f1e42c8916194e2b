#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace otd {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Density values below this are treated as zero; score ratios are refused
// where the density dips under the floor.
inline constexpr double kDensityFloor = 1e-12;

}  // namespace otd
