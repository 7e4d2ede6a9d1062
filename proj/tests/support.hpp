#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace testing_support {

// Seeded generator for hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    int range(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return real(0.0, 1.0) < p; }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[index(xs.size())];
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

inline std::string utf8_of(char32_t cp) {
    std::string s;
    append_utf8(s, cp);
    return s;
}

// A random word drawn from one of several scripts, sometimes mixed, sometimes
// numeric or punctuation.
inline std::string random_word(Gen& g) {
    auto letters = [&](char32_t lo, char32_t hi, int n) {
        std::string w;
        for (int i = 0; i < n; ++i) append_utf8(w, static_cast<char32_t>(g.range(static_cast<int>(lo), static_cast<int>(hi))));
        return w;
    };
    switch (g.range(0, 9)) {
        case 0: return letters('a', 'z', g.range(1, 8));
        case 1: return letters(0xAC00, 0xD7A3, g.range(1, 4));
        case 2: return letters(0x0430, 0x044F, g.range(1, 8));
        case 3: return letters(0x4E00, 0x9FFF, g.range(1, 3));
        case 4: return letters('A', 'Z', 1) + letters('a', 'z', g.range(0, 6)) + letters(0xAC00, 0xD7A3, g.range(1, 2));
        case 5: return std::to_string(g.range(0, 99999));
        case 6: return std::string(1, ",.;:!?()"[g.range(0, 7)]);
        case 7: return letters(0x03B1, 0x03C9, g.range(1, 5));  // Greek
        case 8: return letters(0x0410, 0x042F, 1) + letters(0x0430, 0x044F, g.range(1, 6)) + ",";
        default: return letters('a', 'z', g.range(1, 5)) + letters(0x0430, 0x044F, g.range(1, 3));
    }
}

inline std::vector<std::string> random_words(Gen& g, int min_n, int max_n) {
    std::vector<std::string> ws;
    const int n = g.range(min_n, max_n);
    for (int i = 0; i < n; ++i) ws.push_back(random_word(g));
    return ws;
}

inline std::string join(const std::vector<std::string>& ws, const std::string& sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (i) out += sep;
        out += ws[i];
    }
    return out;
}

}  // namespace testing_support
