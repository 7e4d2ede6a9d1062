#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "langdrift/script_metrics.hpp"

namespace langdrift {

// One line of a rollout/evaluation log:
//   {"step": 120, "text": "...", "id": "...", "gold": "72", "target": "cyrillic"}
struct TraceRecord {
    std::uint64_t step = 0;
    std::string id;
    std::string text;
    std::optional<std::string> gold;
    std::optional<ScriptClass> target;
};

struct ParsedRecords {
    std::vector<TraceRecord> records;
    std::size_t lines = 0;    // non-blank lines seen
    std::size_t skipped = 0;  // malformed lines
    // "line N: reason" for the first few malformed lines.
    std::vector<std::string> diagnostics;
};

// Malformed lines are skipped and counted. Throws FormatError when more than
// half of the non-blank lines are malformed.
ParsedRecords parse_records(std::istream& in);
ParsedRecords parse_records_file(const std::filesystem::path& path);

struct SeriesPoint {
    std::uint64_t step = 0;  // bucket start
    double ratio = 0.0;
    std::size_t count = 0;  // records with counted tokens
    std::optional<double> accuracy;
};

struct TimeSeries {
    std::vector<SeriesPoint> points;
};

// Buckets of width `bucket` steps; per bucket the mean target word ratio
// over records with counted tokens and the mean accuracy over records with a
// gold answer. Buckets without countable records produce no point. A
// record's own `target` overrides `target`.
TimeSeries aggregate(const std::vector<TraceRecord>& records, ScriptClass target, std::uint64_t bucket);

struct OnsetWindow {
    std::uint64_t start_step = 0;
    std::uint64_t end_step = 0;
    double drop = 0.0;
};

// Paired before/after windows of `window` points slide over the series; the
// split with the largest mean drop locates the decline, which is widened to
// every split whose paired drop is at least half that peak. The reported
// drop compares the window before the extent with the window after it, and
// the onset fires when it reaches `min_drop`. Throws InsufficientData when
// the series has fewer than 2 * window points.
std::optional<OnsetWindow> detect_collapse(const TimeSeries& series, std::size_t window, double min_drop);

inline constexpr std::uint64_t kDefaultBucket = 10;
inline constexpr std::uint64_t kDefaultWindowSteps = 25;
inline constexpr double kDefaultMinDrop = 0.5;
inline constexpr double kCollapsedSeverity = 0.1;

// Window in series points covering `window_steps` training steps.
std::size_t window_points(std::uint64_t window_steps, std::uint64_t bucket);

struct AnalyzeOptions {
    ScriptClass target = ScriptClass::Latin;
    std::uint64_t bucket = kDefaultBucket;
    std::uint64_t window_steps = kDefaultWindowSteps;
    double min_drop = kDefaultMinDrop;
};

struct Analysis {
    ScriptClass target = ScriptClass::Latin;
    TimeSeries series;
    std::optional<OnsetWindow> onset;
    bool insufficient_data = false;
    std::size_t records = 0;
    std::size_t skipped = 0;
};

Analysis analyze(const ParsedRecords& parsed, const AnalyzeOptions& opts);

// "collapsed" below kCollapsedSeverity final ratio, "drifting" when an onset
// was detected, else "stable".
std::string severity(const TimeSeries& series, const std::optional<OnsetWindow>& onset);

std::string format_series_csv(const TimeSeries& series);
std::string format_analysis_summary(const Analysis& analysis);

// Writes series.csv and summary.txt into `dir`; returns the paths.
std::vector<std::filesystem::path> write_report(const Analysis& analysis, const std::filesystem::path& dir);

}  // namespace langdrift
