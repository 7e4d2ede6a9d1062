#include "langdrift/trace_ingest.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>

#include "json.hpp"

#include "langdrift/answer_verify.hpp"
#include "langdrift/error.hpp"
#include "text_io.hpp"

namespace langdrift {

using detail::strf;
using nlohmann::json;

namespace {

constexpr std::size_t kMaxDiagnostics = 20;

// Returns an error message, or empty on success.
std::string record_from_json(const json& j, TraceRecord& rec) {
    if (!j.is_object()) return "not an object";

    const auto step = j.find("step");
    if (step == j.end()) return "missing 'step'";
    if (step->is_number_unsigned()) {
        rec.step = step->get<std::uint64_t>();
    } else if (step->is_number_integer()) {
        const auto v = step->get<std::int64_t>();
        if (v < 0) return "negative 'step'";
        rec.step = static_cast<std::uint64_t>(v);
    } else {
        return "'step' must be a non-negative integer";
    }

    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) return "missing or non-string 'text'";
    rec.text = text->get<std::string>();
    if (rec.text.empty()) return "empty 'text'";

    if (auto id = j.find("id"); id != j.end() && !id->is_null()) {
        if (id->is_string())
            rec.id = id->get<std::string>();
        else if (id->is_number())
            rec.id = id->dump();
        else
            return "'id' must be a string";
    }

    if (auto gold = j.find("gold"); gold != j.end() && !gold->is_null()) {
        std::string g;
        if (gold->is_string())
            g = gold->get<std::string>();
        else if (gold->is_number())
            g = gold->dump();
        else
            return "'gold' must be a string or number";
        if (!try_normalize_number(g)) return "'gold' is not a decimal number";
        rec.gold = std::move(g);
    }

    if (auto target = j.find("target"); target != j.end() && !target->is_null()) {
        if (!target->is_string()) return "'target' must be a string";
        const auto s = script_from_name(target->get<std::string>());
        if (!s || !is_concrete_script(*s)) return "unknown 'target' (valid: hangul, latin, cjk, cyrillic)";
        rec.target = *s;
    }
    return {};
}

double mean(const std::vector<SeriesPoint>& pts, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += pts[i].ratio;
    return s / static_cast<double>(to - from);
}

}  // namespace

ParsedRecords parse_records(std::istream& in) {
    ParsedRecords out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++out.lines;

        std::string err;
        TraceRecord rec;
        const auto j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            err = "invalid JSON";
        else
            err = record_from_json(j, rec);

        if (err.empty()) {
            out.records.push_back(std::move(rec));
        } else {
            ++out.skipped;
            if (out.diagnostics.size() < kMaxDiagnostics) out.diagnostics.push_back(strf("line %zu: %s", lineno, err.c_str()));
        }
    }
    if (in.bad()) throw IoError("read error while parsing records");
    if (out.lines > 0 && out.skipped * 2 > out.lines)
        throw FormatError(strf("%zu of %zu lines are malformed; not a rollout log?", out.skipped, out.lines));
    return out;
}

ParsedRecords parse_records_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    try {
        return parse_records(f);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

TimeSeries aggregate(const std::vector<TraceRecord>& records, ScriptClass target, std::uint64_t bucket) {
    if (bucket < 1) throw InvalidArgument("bucket must be >= 1");
    if (!is_concrete_script(target)) throw InvalidArgument("aggregate target must be a concrete script");

    struct Acc {
        double ratio_sum = 0.0;
        std::size_t count = 0;
        double correct = 0.0;
        std::size_t golds = 0;
    };
    std::map<std::uint64_t, Acc> buckets;
    for (const auto& rec : records) {
        auto& acc = buckets[rec.step / bucket * bucket];
        const auto comp = composition(rec.text);
        if (comp.counted_tokens > 0) {
            acc.ratio_sum += comp.word(rec.target.value_or(target));
            ++acc.count;
        }
        if (rec.gold) {
            acc.correct += is_correct(rec.text, *rec.gold) ? 1.0 : 0.0;
            ++acc.golds;
        }
    }

    TimeSeries ts;
    for (const auto& [step, acc] : buckets) {
        if (acc.count == 0) continue;
        SeriesPoint p;
        p.step = step;
        p.count = acc.count;
        p.ratio = acc.ratio_sum / static_cast<double>(acc.count);
        if (acc.golds > 0) p.accuracy = acc.correct / static_cast<double>(acc.golds);
        ts.points.push_back(p);
    }
    return ts;
}

std::optional<OnsetWindow> detect_collapse(const TimeSeries& series, std::size_t window, double min_drop) {
    if (window < 1) throw InvalidArgument("window must be >= 1");
    if (!(min_drop > 0.0 && min_drop <= 1.0)) throw InvalidArgument("min_drop must be in (0, 1]");
    const auto& pts = series.points;
    const std::size_t n = pts.size();
    if (n < 2 * window)
        throw InsufficientData(strf("series has %zu points, need at least %zu for window %zu", n, 2 * window, window));

    // drops[k] belongs to split index k + window: mean(before) - mean(after).
    std::vector<double> drops;
    for (std::size_t split = window; split + window <= n; ++split)
        drops.push_back(mean(pts, split - window, split) - mean(pts, split, split + window));

    const auto peak_it = std::max_element(drops.begin(), drops.end());
    const double peak = *peak_it;
    if (!(peak > 0.0)) return std::nullopt;

    std::size_t lo = static_cast<std::size_t>(peak_it - drops.begin());
    std::size_t hi = lo;
    while (lo > 0 && drops[lo - 1] >= 0.5 * peak) --lo;
    while (hi + 1 < drops.size() && drops[hi + 1] >= 0.5 * peak) ++hi;

    const std::size_t start = lo + window;
    std::size_t end = hi + window;
    if (end == start && end + 1 < n) ++end;

    const std::size_t after_begin = std::min(end, n - window);
    const double drop = mean(pts, start - window, start) - mean(pts, after_begin, after_begin + window);
    if (drop < min_drop) return std::nullopt;
    return OnsetWindow{pts[start].step, pts[end].step, drop};
}

std::size_t window_points(std::uint64_t window_steps, std::uint64_t bucket) {
    if (bucket < 1) throw InvalidArgument("bucket must be >= 1");
    return static_cast<std::size_t>(std::max<std::uint64_t>(1, (window_steps + bucket - 1) / bucket));
}

Analysis analyze(const ParsedRecords& parsed, const AnalyzeOptions& opts) {
    Analysis a;
    a.target = opts.target;
    a.records = parsed.records.size();
    a.skipped = parsed.skipped;
    a.series = aggregate(parsed.records, opts.target, opts.bucket);
    try {
        a.onset = detect_collapse(a.series, window_points(opts.window_steps, opts.bucket), opts.min_drop);
    } catch (const InsufficientData&) {
        a.insufficient_data = true;
    }
    return a;
}

std::string severity(const TimeSeries& series, const std::optional<OnsetWindow>& onset) {
    if (!series.points.empty() && series.points.back().ratio < kCollapsedSeverity) return "collapsed";
    return onset ? "drifting" : "stable";
}

std::string format_series_csv(const TimeSeries& series) {
    std::string out = "step,ratio,count,accuracy\n";
    for (const auto& p : series.points) {
        out += strf("%llu,%.6f,%zu,", static_cast<unsigned long long>(p.step), p.ratio, p.count);
        if (p.accuracy) out += strf("%.6f", *p.accuracy);
        out += "\n";
    }
    return out;
}

std::string format_analysis_summary(const Analysis& a) {
    const auto& pts = a.series.points;
    std::string out;
    out += "target: " + std::string(script_name(a.target)) + "\n";
    out += strf("records: %zu\nskipped: %zu\npoints: %zu\n", a.records, a.skipped, pts.size());
    if (a.onset) {
        out += strf("onset: %llu-%llu\n", static_cast<unsigned long long>(a.onset->start_step),
                    static_cast<unsigned long long>(a.onset->end_step));
        out += strf("onset_start: %llu\nonset_end: %llu\nonset_drop: %.6f\n",
                    static_cast<unsigned long long>(a.onset->start_step),
                    static_cast<unsigned long long>(a.onset->end_step), a.onset->drop);
    } else {
        out += "onset: none\n";
    }
    if (a.insufficient_data) out += "detection: insufficient_data\n";
    if (!pts.empty()) {
        double min_ratio = pts.front().ratio;
        for (const auto& p : pts) min_ratio = std::min(min_ratio, p.ratio);
        out += strf("initial_ratio: %.6f\nfinal_ratio: %.6f\nmin_ratio: %.6f\nratio_delta_pp: %.2f\n", pts.front().ratio,
                    pts.back().ratio, min_ratio, 100.0 * (pts.back().ratio - pts.front().ratio));

        const SeriesPoint* first_acc = nullptr;
        const SeriesPoint* last_acc = nullptr;
        for (const auto& p : pts) {
            if (!p.accuracy) continue;
            if (!first_acc) first_acc = &p;
            last_acc = &p;
        }
        if (first_acc) {
            out += strf("initial_accuracy: %.6f\nfinal_accuracy: %.6f\naccuracy_delta_pp: %.2f\n", *first_acc->accuracy,
                        *last_acc->accuracy, 100.0 * (*last_acc->accuracy - *first_acc->accuracy));
        }
    }
    out += "severity: " + severity(a.series, a.onset) + "\n";
    return out;
}

std::vector<std::filesystem::path> write_report(const Analysis& analysis, const std::filesystem::path& dir) {
    detail::ensure_dir(dir);
    const auto csv = dir / "series.csv";
    const auto summary = dir / "summary.txt";
    detail::write_file(csv, format_series_csv(analysis.series));
    detail::write_file(summary, format_analysis_summary(analysis));
    return {csv, summary};
}

}  // namespace langdrift
