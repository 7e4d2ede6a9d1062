#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace langdrift {

// Canonical form of a finite decimal: no thousands separators, no leading
// integer zeros, no trailing fractional zeros, and zero is always positive.
struct CanonicalNumber {
    int sign = 1;
    std::string digits = "0";
    std::string frac;

    std::string to_string() const;

    friend bool operator==(const CanonicalNumber&, const CanonicalNumber&) = default;
};

// Content of the last \boxed{...} if any, else the last standalone decimal
// number (commas allowed as thousands separators).
std::optional<std::string> extract_answer(std::string_view completion);

// Throws ParseError carrying the offending substring on non-numeric input.
CanonicalNumber normalize_number(std::string_view s);

std::optional<CanonicalNumber> try_normalize_number(std::string_view s) noexcept;

bool is_correct(std::string_view completion, std::string_view gold);

}  // namespace langdrift
