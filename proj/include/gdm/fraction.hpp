#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>
#include <json.hpp>

// Boost 1.74 under C++20: the reversed candidates synthesized for
// rational == integer call each other forever. Exact overloads win.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) {
    return a.denominator() == 1 && a.numerator() == b;
}
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == static_cast<std::int64_t>(b); }
}  // namespace boost

namespace gdm {

// Exact rational used for weights, scores and thresholds. Comparisons such
// as `score == 1` and `score >= 2/3` must not go through floating point.
using Fraction = boost::rational<std::int64_t>;

// Accepts "3/5", "0.8", "2", "1e-3" and the like. Throws Error(BadRequest).
Fraction parseFraction(std::string_view text);

// Integer-valued fractions render as "n", others as "n/d".
std::string formatFraction(const Fraction& f);

double toDouble(const Fraction& f);

// JSON form: a number when the fraction is integral, otherwise "n/d".
// Reading accepts numbers (decimal text is parsed exactly) and strings.
nlohmann::json fractionToJson(const Fraction& f);
Fraction fractionFromJson(const nlohmann::json& j);

}  // namespace gdm
