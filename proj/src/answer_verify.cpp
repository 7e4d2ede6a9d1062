#include "langdrift/answer_verify.hpp"

#include <vector>

#include "langdrift/error.hpp"

namespace langdrift {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Length of the longest prefix of `s` that is an unsigned decimal in our
// grammar: (d{1,3}(,ddd)+ | d+) (. d+)?, or 0 if none.
std::size_t numeric_prefix(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size() && is_digit(s[i])) ++i;
    if (i == 0) return 0;

    if (i <= 3) {
        std::size_t j = i;
        while (j + 4 <= s.size() && s[j] == ',' && is_digit(s[j + 1]) && is_digit(s[j + 2]) &&
               is_digit(s[j + 3]) && (j + 4 == s.size() || !is_digit(s[j + 4])))
            j += 4;
        i = j;
    }
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
        ++i;
        while (i < s.size() && is_digit(s[i])) ++i;
    }
    return i;
}

std::optional<std::string> last_boxed(std::string_view s) {
    constexpr std::string_view kBoxed = "\\boxed{";
    std::optional<std::string> found;
    for (auto pos = s.find(kBoxed); pos != std::string_view::npos; pos = s.find(kBoxed, pos + 1)) {
        int depth = 1;
        std::size_t k = pos + kBoxed.size();
        for (; k < s.size() && depth > 0; ++k) {
            if (s[k] == '{')
                ++depth;
            else if (s[k] == '}')
                --depth;
        }
        if (depth == 0) {
            const auto begin = pos + kBoxed.size();
            found = std::string(trim(s.substr(begin, k - 1 - begin)));
        }
    }
    return found;
}

std::optional<std::string> last_number(std::string_view s) {
    std::optional<std::string> found;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_digit(s[i]) || (i > 0 && (is_digit(s[i - 1]) || s[i - 1] == '.' || s[i - 1] == ','))) {
            ++i;
            continue;
        }
        // A run of digits and separators; split it into consecutive numbers.
        std::size_t end = i;
        while (end < s.size() && (is_digit(s[end]) || s[end] == '.' || s[end] == ',')) ++end;
        const bool negative = i > 0 && s[i - 1] == '-' && (i < 2 || !is_digit(s[i - 2]));
        std::size_t k = i;
        bool first = true;
        while (k < end) {
            const auto len = numeric_prefix(s.substr(k, end - k));
            if (len == 0) {
                ++k;
                continue;
            }
            std::string num(s.substr(k, len));
            if (first && negative) num.insert(num.begin(), '-');
            found = std::move(num);
            first = false;
            k += len;
        }
        i = end;
    }
    return found;
}

}  // namespace

std::string CanonicalNumber::to_string() const {
    std::string out = sign < 0 ? "-" : "";
    out += digits;
    if (!frac.empty()) out += "." + frac;
    return out;
}

CanonicalNumber normalize_number(std::string_view raw) {
    const auto s = trim(raw);
    if (s.empty()) throw ParseError("empty number", std::string(raw));

    std::size_t i = 0;
    int sign = 1;
    if (s[0] == '+' || s[0] == '-') {
        sign = s[0] == '-' ? -1 : 1;
        ++i;
    }

    std::string int_digits;
    const std::size_t int_begin = i;
    while (i < s.size() && (is_digit(s[i]) || s[i] == ',')) ++i;
    const auto int_part = s.substr(int_begin, i - int_begin);
    if (int_part.find(',') != std::string_view::npos) {
        // Strict thousands grouping: 1-3 leading digits then groups of 3.
        const auto first = int_part.find(',');
        if (first == 0 || first > 3) throw ParseError("bad thousands grouping", std::string(int_part));
        for (std::size_t g = first; g < int_part.size(); g += 4) {
            if (int_part[g] != ',' || g + 4 > int_part.size() || !is_digit(int_part[g + 1]) ||
                !is_digit(int_part[g + 2]) || !is_digit(int_part[g + 3]))
                throw ParseError("bad thousands grouping", std::string(int_part.substr(g)));
        }
    }
    for (char c : int_part)
        if (c != ',') int_digits.push_back(c);

    std::string frac_digits;
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) frac_digits.push_back(s[i++]);
    }
    if (i != s.size()) throw ParseError("not a decimal number", std::string(s.substr(i)));
    if (int_digits.empty() && frac_digits.empty()) throw ParseError("not a decimal number", std::string(s));

    CanonicalNumber n;
    const auto nz = int_digits.find_first_not_of('0');
    n.digits = nz == std::string::npos ? "0" : int_digits.substr(nz);
    const auto last = frac_digits.find_last_not_of('0');
    n.frac = last == std::string::npos ? "" : frac_digits.substr(0, last + 1);
    n.sign = (n.digits == "0" && n.frac.empty()) ? 1 : sign;
    return n;
}

std::optional<CanonicalNumber> try_normalize_number(std::string_view s) noexcept {
    try {
        return normalize_number(s);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<std::string> extract_answer(std::string_view completion) {
    if (auto boxed = last_boxed(completion)) return boxed;
    return last_number(completion);
}

bool is_correct(std::string_view completion, std::string_view gold) {
    const auto expected = normalize_number(gold);
    const auto answer = extract_answer(completion);
    if (!answer) return false;
    const auto got = try_normalize_number(*answer);
    return got && *got == expected;
}

}  // namespace langdrift
