#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace coherency {

using Rational = boost::multiprecision::cpp_rational;

// 100 * value, rounded half-up to two decimals: 0.10775 -> "10.78".
std::string format_percent(const Rational& value);

double to_double(const Rational& value);

}  // namespace coherency
