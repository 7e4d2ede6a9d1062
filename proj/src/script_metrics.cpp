#include "langdrift/script_metrics.hpp"

#include <array>

#include "langdrift/error.hpp"
#include "utf8.hpp"

namespace langdrift {

namespace {

constexpr std::array<std::pair<ScriptClass, std::string_view>, 7> kNames{{
    {ScriptClass::Hangul, "hangul"},
    {ScriptClass::Latin, "latin"},
    {ScriptClass::Cjk, "cjk"},
    {ScriptClass::Cyrillic, "cyrillic"},
    {ScriptClass::CodeSwitch, "code_switch"},
    {ScriptClass::Discarded, "discarded"},
    {ScriptClass::Other, "other"},
}};

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_ascii_alpha(char32_t cp) { return in(cp, 'A', 'Z') || in(cp, 'a', 'z'); }

bool is_space(char32_t cp) {
    return in(cp, 0x09, 0x0D) || cp == 0x20 || cp == 0x85 || cp == 0xA0 || cp == 0x1680 ||
           in(cp, 0x2000, 0x200A) || cp == 0x2028 || cp == 0x2029 || cp == 0x202F ||
           cp == 0x205F || cp == 0x3000 || cp == 0xFEFF;
}

// Codepoints that become a token of their own: ASCII punctuation (minus the
// backslash), Latin-1 symbols, general punctuation, currency, arrows, math
// operators, CJK and fullwidth punctuation, emoji.
bool is_split_symbol(char32_t cp) {
    if (cp < 0x80) {
        return (in(cp, 0x21, 0x2F) || in(cp, 0x3A, 0x40) || in(cp, 0x5B, 0x60) ||
                in(cp, 0x7B, 0x7E)) &&
               cp != '\\';
    }
    if (in(cp, 0xA1, 0xBF)) return cp != 0xAA && cp != 0xB5 && cp != 0xBA;
    return cp == 0xD7 || cp == 0xF7 || in(cp, 0x2010, 0x2027) || in(cp, 0x2030, 0x205E) ||
           in(cp, 0x20A0, 0x20CF) || in(cp, 0x2100, 0x2BFF) || in(cp, 0x2E00, 0x2E7F) ||
           in(cp, 0x3001, 0x3004) || in(cp, 0x3008, 0x3020) || cp == 0x3030 ||
           in(cp, 0x303D, 0x303F) || in(cp, 0xFE10, 0xFE1F) || in(cp, 0xFE30, 0xFE6F) ||
           in(cp, 0xFF01, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
           in(cp, 0xFF5B, 0xFF65) || in(cp, 0xFFE0, 0xFFEE) || in(cp, 0xFFF9, 0xFFFD) ||
           in(cp, 0x1F000, 0x1FAFF);
}

bool is_digit(char32_t cp) {
    return in(cp, '0', '9') || in(cp, 0xFF10, 0xFF19) || in(cp, 0x0660, 0x0669) ||
           in(cp, 0x06F0, 0x06F9) || in(cp, 0x0966, 0x096F);
}

// Non-letters that never split a token: digits, controls, combining marks,
// zero-width format characters, variation selectors, super/subscripts.
bool is_inert(char32_t cp) {
    return is_digit(cp) || cp < 0x20 || in(cp, 0x7F, 0x9F) || in(cp, 0x0300, 0x036F) ||
           in(cp, 0x1AB0, 0x1AFF) || in(cp, 0x1DC0, 0x1DFF) || in(cp, 0x200B, 0x200F) ||
           in(cp, 0x2060, 0x209F) || in(cp, 0x20D0, 0x20FF) || in(cp, 0xFE00, 0xFE0F) ||
           in(cp, 0xFE20, 0xFE2F) || in(cp, 0xE0000, 0xE01EF);
}

bool is_joiner(char32_t cp) { return cp == '\'' || cp == 0x2019 || cp == '-'; }

bool is_generic_letter(char32_t cp) {
    if (cp < 0x80) return is_ascii_alpha(cp);
    return !is_space(cp) && !is_split_symbol(cp) && !is_inert(cp);
}

// Single place that knows the cross-script scan used by both the token
// classifier and the character counter.
template <typename Fn>
void for_each_codepoint(std::string_view s, Fn&& fn) {
    for (std::size_t i = 0; i < s.size();) {
        const auto d = utf8::decode(s, i);
        fn(d.cp);
        i += d.len;
    }
}

std::size_t find_unescaped_dollar(std::string_view s, std::size_t from, bool same_line, bool doubled) {
    for (std::size_t k = from; k < s.size(); ++k) {
        const char c = s[k];
        if (c == '\\') {
            ++k;
            continue;
        }
        if (same_line && c == '\n') return std::string_view::npos;
        if (c == '$') {
            if (!doubled) return k;
            if (k + 1 < s.size() && s[k + 1] == '$') return k;
        }
    }
    return std::string_view::npos;
}

// Parses "\begin{name}" / "\end{name}" at `pos`; returns the marker length
// and fills `name`, or 0 when the text there is not a complete marker.
std::size_t env_marker(std::string_view s, std::size_t pos, std::string_view prefix, std::string_view& name) {
    if (s.compare(pos, prefix.size(), prefix) != 0) return 0;
    const auto open = pos + prefix.size();
    const auto close = s.find('}', open);
    if (close == std::string_view::npos) return 0;
    name = s.substr(open, close - open);
    if (name.find('\n') != std::string_view::npos) return 0;
    return close + 1 - pos;
}

// Offset just past the \end{name} matching a \begin{name} whose marker ends
// at `from`, honouring nesting of the same environment name.
std::size_t find_env_end(std::string_view s, std::size_t from, std::string_view name) {
    int depth = 1;
    for (std::size_t k = s.find('\\', from); k != std::string_view::npos; k = s.find('\\', k + 1)) {
        std::string_view other;
        if (auto len = env_marker(s, k, "\\begin{", other); len && other == name) {
            ++depth;
            k += len - 1;
        } else if (auto len2 = env_marker(s, k, "\\end{", other); len2 && other == name) {
            if (--depth == 0) return k + len2;
            k += len2 - 1;
        }
    }
    return std::string_view::npos;
}

}  // namespace

std::string_view script_name(ScriptClass s) noexcept {
    for (const auto& [cls, name] : kNames)
        if (cls == s) return name;
    return "other";
}

std::optional<ScriptClass> script_from_name(std::string_view name) noexcept {
    for (const auto& [cls, n] : kNames)
        if (n == name) return cls;
    return std::nullopt;
}

bool is_concrete_script(ScriptClass s) noexcept {
    return s == ScriptClass::Hangul || s == ScriptClass::Latin || s == ScriptClass::Cjk ||
           s == ScriptClass::Cyrillic;
}

ScriptClass parse_target_script(std::string_view name) {
    auto s = script_from_name(name);
    if (!s || !is_concrete_script(*s))
        throw ParseError("unknown target script (valid: hangul, latin, cjk, cyrillic)", std::string(name));
    return *s;
}

const ScriptConfig& ScriptConfig::defaults() {
    static const ScriptConfig cfg;
    return cfg;
}

StripResult strip_latex_diag(std::string_view s) {
    StripResult r;
    r.text.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\\') {
            std::string_view name;
            if (auto len = env_marker(s, i, "\\begin{", name)) {
                const auto end = find_env_end(s, i + len, name);
                if (end == std::string_view::npos) {
                    ++r.unbalanced;
                    i += len;
                } else {
                    i = end;
                }
                r.text.push_back(' ');
            } else if (auto len2 = env_marker(s, i, "\\end{", name)) {
                ++r.unbalanced;
                r.text.push_back(' ');
                i += len2;
            } else if (i + 1 < s.size()) {
                r.text.append(s.substr(i, 2));
                i += 2;
            } else {
                r.text.push_back(c);
                ++i;
            }
        } else if (c == '$') {
            const bool display = i + 1 < s.size() && s[i + 1] == '$';
            const auto close = display ? find_unescaped_dollar(s, i + 2, false, true)
                                       : find_unescaped_dollar(s, i + 1, true, false);
            if (close != std::string_view::npos) {
                r.text.push_back(' ');
                i = close + (display ? 2 : 1);
            } else {
                ++r.unbalanced;
                auto eol = s.find('\n', i);
                if (eol == std::string_view::npos) eol = s.size();
                r.text.append(s.substr(i, eol - i));
                i = eol;
            }
        } else {
            r.text.push_back(c);
            ++i;
        }
    }
    return r;
}

std::string strip_latex(std::string_view text) { return strip_latex_diag(text).text; }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<char32_t> cps;
    std::vector<std::string_view> raw;  // original bytes per codepoint
    cps.reserve(text.size());
    raw.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        const auto d = utf8::decode(text, i);
        cps.push_back(d.cp);
        raw.push_back(text.substr(i, d.len));
        i += d.len;
    }

    std::vector<std::string> tokens;
    std::string cur;
    char32_t last = 0;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
        last = 0;
    };

    const std::size_t n = cps.size();
    for (std::size_t i = 0; i < n; ++i) {
        const char32_t cp = cps[i];
        if (is_space(cp)) {
            flush();
            continue;
        }
        if (cp == '\\') {
            flush();
            cur.append(raw[i]);
            if (i + 1 < n && is_ascii_alpha(cps[i + 1])) {
                while (i + 1 < n && is_ascii_alpha(cps[i + 1])) cur.append(raw[++i]);
            } else if (i + 1 < n && !is_space(cps[i + 1])) {
                cur.append(raw[++i]);
            }
            flush();
            continue;
        }
        if (is_split_symbol(cp)) {
            const char32_t next = i + 1 < n ? cps[i + 1] : 0;
            const bool numeric_sep = (cp == '.' || cp == ',') && !cur.empty() && is_digit(last) && is_digit(next);
            const bool word_joiner = is_joiner(cp) && !cur.empty() && is_generic_letter(last) && is_generic_letter(next);
            if (!numeric_sep && !word_joiner) {
                flush();
                tokens.emplace_back(raw[i]);
                continue;
            }
        }
        cur.append(raw[i]);
        last = cp;
    }
    flush();
    return tokens;
}

std::optional<ScriptClass> letter_script(char32_t cp, const ScriptConfig& cfg) {
    if (is_ascii_alpha(cp)) return ScriptClass::Latin;
    if (in(cp, 0xAC00, 0xD7A3)) return ScriptClass::Hangul;
    if (in(cp, 0x0400, 0x04FF)) return ScriptClass::Cyrillic;
    for (const auto& r : cfg.cjk_ranges)
        if (r.contains(cp)) return ScriptClass::Cjk;
    if (is_generic_letter(cp)) return ScriptClass::Other;
    return std::nullopt;
}

ScriptClass classify_token(std::string_view token, const ScriptConfig& cfg) {
    if (token.empty() || token.front() == '\\') return ScriptClass::Discarded;

    bool seen[4] = {false, false, false, false};  // Hangul, Latin, Cjk, Cyrillic
    bool other = false;
    for_each_codepoint(token, [&](char32_t cp) {
        const auto s = letter_script(cp, cfg);
        if (!s) return;
        if (*s == ScriptClass::Other)
            other = true;
        else
            seen[static_cast<int>(*s)] = true;
    });

    const int scripts = seen[0] + seen[1] + seen[2] + seen[3];
    if (other) return ScriptClass::Other;
    if (scripts == 0) return ScriptClass::Discarded;
    if (scripts == 1) {
        for (int k = 0; k < 4; ++k)
            if (seen[k]) return static_cast<ScriptClass>(k);
    }
    if (scripts == 2 && seen[static_cast<int>(ScriptClass::Latin)]) return ScriptClass::CodeSwitch;
    return ScriptClass::Other;
}

double LanguageComposition::word(ScriptClass s) const noexcept {
    auto it = word_ratio.find(s);
    return it == word_ratio.end() ? 0.0 : it->second;
}

double LanguageComposition::chars(ScriptClass s) const noexcept {
    auto it = char_ratio.find(s);
    return it == char_ratio.end() ? 0.0 : it->second;
}

LanguageComposition composition(std::string_view text, const ScriptConfig& cfg) {
    const auto stripped = strip_latex(text);
    std::map<ScriptClass, std::size_t> words;
    std::map<ScriptClass, std::size_t> letters;
    std::size_t total_letters = 0;

    LanguageComposition out;
    for (const auto& tok : tokenize(stripped)) {
        const auto cls = classify_token(tok, cfg);
        if (cls == ScriptClass::Discarded) {
            ++out.discarded_tokens;
            continue;
        }
        ++out.counted_tokens;
        ++words[cls];
        for_each_codepoint(tok, [&](char32_t cp) {
            if (auto s = letter_script(cp, cfg)) {
                ++letters[*s];
                ++total_letters;
            }
        });
    }

    if (out.counted_tokens == 0) return out;
    for (const auto& [cls, count] : words)
        out.word_ratio[cls] = static_cast<double>(count) / static_cast<double>(out.counted_tokens);
    if (total_letters > 0) {
        for (const auto& [cls, count] : letters)
            out.char_ratio[cls] = static_cast<double>(count) / static_cast<double>(total_letters);
    }
    out.code_switch_ratio = out.word(ScriptClass::CodeSwitch);
    return out;
}

}  // namespace langdrift
