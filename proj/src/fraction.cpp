#include "gdm/fraction.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <limits>

#include <json.hpp>

#include "gdm/error.hpp"

namespace gdm {

namespace {

[[noreturn]] void bad(std::string_view text) {
    throw Error(ErrorCode::BadRequest, "not a fraction: '" + std::string(text) + "'");
}

std::int64_t parseInt(std::string_view text, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) bad(whole);
    return v;
}

std::int64_t pow10(int e, std::string_view whole) {
    std::int64_t p = 1;
    for (int i = 0; i < e; ++i) {
        if (p > std::numeric_limits<std::int64_t>::max() / 10) bad(whole);
        p *= 10;
    }
    return p;
}

Fraction parseDecimal(std::string_view text) {
    std::string_view whole = text;
    int exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
        auto expText = text.substr(e + 1);
        if (!expText.empty() && expText.front() == '+') expText.remove_prefix(1);
        auto parsed = parseInt(expText, whole);
        if (parsed > 18 || parsed < -18) bad(whole);
        exponent = static_cast<int>(parsed);
        text = text.substr(0, e);
    }
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    std::string digits;
    int scale = 0;
    bool seenDot = false;
    for (char c : text) {
        if (c == '.') {
            if (seenDot) bad(whole);
            seenDot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seenDot) ++scale;
        } else {
            bad(whole);
        }
    }
    if (digits.empty()) bad(whole);
    // strip leading zeros so large-but-representable values parse
    auto first = digits.find_first_not_of('0');
    digits = first == std::string::npos ? "0" : digits.substr(first);
    scale -= exponent;
    std::int64_t num = parseInt(digits, whole);
    if (negative) num = -num;
    if (scale >= 0) return Fraction(num, pow10(scale, whole));
    std::int64_t mul = pow10(-scale, whole);
    if (num != 0 && std::abs(num) > std::numeric_limits<std::int64_t>::max() / mul) bad(whole);
    return Fraction(num * mul);
}

}  // namespace

Fraction parseFraction(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) bad(text);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = parseInt(text.substr(0, slash), text);
        auto den = parseInt(text.substr(slash + 1), text);
        if (den == 0) bad(text);
        return Fraction(num, den);
    }
    return parseDecimal(text);
}

std::string formatFraction(const Fraction& f) {
    if (f.denominator() == 1) return std::to_string(f.numerator());
    return std::to_string(f.numerator()) + "/" + std::to_string(f.denominator());
}

double toDouble(const Fraction& f) {
    return static_cast<double>(f.numerator()) / static_cast<double>(f.denominator());
}

nlohmann::json fractionToJson(const Fraction& f) {
    if (f.denominator() == 1) return f.numerator();
    return formatFraction(f);
}

Fraction fractionFromJson(const nlohmann::json& j) {
    if (j.is_number_integer()) return Fraction(j.get<std::int64_t>());
    // dump() yields the shortest text that round-trips, so 0.9 stays "0.9"
    if (j.is_number()) return parseDecimal(j.dump());
    if (j.is_string()) return parseFraction(j.get<std::string>());
    throw Error(ErrorCode::BadRequest, "expected a number or fraction string, got " + j.dump());
}

}  // namespace gdm
