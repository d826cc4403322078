#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace krden {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Thrown when a counting search exceeds the configured node budget
// (see KRDEN_BUDGET).
struct budget_exceeded : std::runtime_error {
    explicit budget_exceeded(const std::string& w) : std::runtime_error(w) {}
};

// Thrown when two consecutive certification stages disagree (depth
// stabilization or interpolation degree discovery).  The message reports
// both candidate values.
struct not_stabilized : std::runtime_error {
    explicit not_stabilized(const std::string& w) : std::runtime_error(w) {}
};

Int pow_int(long base, long exp);        // exp >= 0
Rat pow_rat(const Rat& base, long exp);  // base != 0 when exp < 0
Rat p_power(long p, long exp);           // p^exp, exp may be negative

// "a" when the denominator is 1, otherwise "a/b".
std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

}  // namespace krden
