#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace langdrift {

enum class ScriptClass : std::uint8_t {
    Hangul,
    Latin,
    Cjk,
    Cyrillic,
    CodeSwitch,
    Discarded,
    Other,
};

// Lowercase wire names: hangul, latin, cjk, cyrillic, code_switch,
// discarded, other.
std::string_view script_name(ScriptClass s) noexcept;
std::optional<ScriptClass> script_from_name(std::string_view name) noexcept;

// True for the four scripts a text can be "in" (usable as a reward target).
bool is_concrete_script(ScriptClass s) noexcept;

// Parses a concrete target script name; throws ParseError listing the valid
// names otherwise.
ScriptClass parse_target_script(std::string_view name);

struct CodepointRange {
    char32_t first;
    char32_t last;  // inclusive

    bool contains(char32_t cp) const noexcept { return cp >= first && cp <= last; }
};

struct ScriptConfig {
    // Unified ideographs, extension A, compatibility ideographs.
    std::vector<CodepointRange> cjk_ranges{
        {0x4E00, 0x9FFF},
        {0x3400, 0x4DBF},
        {0xF900, 0xFAFF},
    };

    static const ScriptConfig& defaults();
};

struct StripResult {
    std::string text;
    // Dangling `$`/`$$` delimiters and unmatched \begin/\end markers.
    std::size_t unbalanced = 0;
};

// Removes $...$, $$...$$ and \begin{env}...\end{env} spans, replacing each
// with a single space. Inline `$...$` must close on the same line; a
// delimiter that never closes is kept verbatim together with the rest of its
// line. `\$` is a literal dollar sign.
StripResult strip_latex_diag(std::string_view text);
std::string strip_latex(std::string_view text);

// Whitespace splitting plus separation of punctuation, brackets, quotes and
// symbols into single-codepoint tokens. `.`/`,` between digits and `'`, `’`,
// `-` between letters stay inside the word. A backslash starts a command
// token that absorbs the following ASCII letters.
std::vector<std::string> tokenize(std::string_view text);

// Script of a single codepoint when it counts as a letter, nullopt for
// digits, symbols, marks and whitespace. Codepoints inside the declared
// script ranges always count as letters of that script.
std::optional<ScriptClass> letter_script(char32_t cp, const ScriptConfig& cfg = ScriptConfig::defaults());

ScriptClass classify_token(std::string_view token, const ScriptConfig& cfg = ScriptConfig::defaults());

struct LanguageComposition {
    // Only classes with a non-zero share appear; both maps are empty when
    // counted_tokens == 0.
    std::map<ScriptClass, double> word_ratio;
    std::map<ScriptClass, double> char_ratio;
    double code_switch_ratio = 0.0;
    std::size_t counted_tokens = 0;
    std::size_t discarded_tokens = 0;

    double word(ScriptClass s) const noexcept;
    double chars(ScriptClass s) const noexcept;
};

LanguageComposition composition(std::string_view text, const ScriptConfig& cfg = ScriptConfig::defaults());

}  // namespace langdrift
