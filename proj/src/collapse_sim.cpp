#include "langdrift/collapse_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "langdrift/error.hpp"
#include "text_io.hpp"

namespace langdrift {

using detail::strf;

void EnvConfig::validate() const {
    if (trace_len < 1) throw InvalidArgument("trace_len must be >= 1");
    if (group_size < 2) throw InvalidArgument("group_size must be >= 2");
    if (steps < 1) throw InvalidArgument("steps must be >= 1");
    if (!(q_lo >= 0.0 && q_lo <= q_hi && q_hi <= 1.0)) throw InvalidArgument("need 0 <= q_lo <= q_hi <= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("lr must be > 0");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");
    if (!std::isfinite(theta0) || !std::isfinite(bias)) throw InvalidArgument("theta0 and bias must be finite");
}

double env_accuracy_prob(double hi_ratio, const EnvConfig& env) noexcept {
    return env.q_lo + (env.q_hi - env.q_lo) * hi_ratio;
}

Rollout sample_rollout(const PolicyParams& policy, const EnvConfig& env, Rng& rng) {
    const double p = policy.hi_prob();
    Rollout r;
    r.trace_langs.reserve(static_cast<std::size_t>(env.trace_len));
    int hi = 0;
    for (int t = 0; t < env.trace_len; ++t) {
        const bool is_hi = rng.bernoulli(p);
        hi += is_hi;
        r.trace_langs.push_back(is_hi ? Lang::Hi : Lang::Lo);
    }
    r.hi_ratio = static_cast<double>(hi) / static_cast<double>(env.trace_len);
    r.correct = rng.bernoulli(env_accuracy_prob(r.hi_ratio, env));
    r.reward = (r.correct ? 1.0 : 0.0) + env.lambda * (1.0 - r.hi_ratio);
    return r;
}

GroupSample sample_group(const PolicyParams& policy, const EnvConfig& env, Rng& rng) {
    GroupSample g;
    g.rollouts.reserve(static_cast<std::size_t>(env.group_size));
    for (int i = 0; i < env.group_size; ++i) g.rollouts.push_back(sample_rollout(policy, env, rng));
    assign_advantages(g);
    return g;
}

RunLog run_training(const EnvConfig& env) {
    env.validate();
    Rng rng(env.seed);
    PolicyParams policy{env.theta0, env.bias};
    RunLog log;
    log.records.reserve(static_cast<std::size_t>(env.steps));
    for (int step = 0; step < env.steps; ++step) {
        const auto group = sample_group(policy, env, rng);
        double target = 0.0;
        double correct = 0.0;
        for (const auto& r : group.rollouts) {
            target += 1.0 - r.hi_ratio;
            correct += r.correct ? 1.0 : 0.0;
        }
        const double g = static_cast<double>(group.rollouts.size());
        try {
            policy = grpo_step(policy, group, env.lr, env.grpo);
        } catch (const NumericError& e) {
            log.error = strf("step %d: %s", step, e.what());
            break;
        }
        log.records.push_back({step, target / g, correct / g, policy.theta});
    }
    return log;
}

std::vector<double> moving_average(const std::vector<double>& xs, int window) {
    if (window < 1) throw InvalidArgument("moving-average window must be >= 1");
    std::vector<double> out;
    out.reserve(xs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += xs[i];
        if (i >= static_cast<std::size_t>(window)) sum -= xs[i - window];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out.push_back(sum / static_cast<double>(n));
    }
    return out;
}

std::vector<double> target_ratios(const RunLog& log) {
    std::vector<double> xs;
    xs.reserve(log.records.size());
    for (const auto& r : log.records) xs.push_back(r.target_ratio);
    return xs;
}

std::optional<int> collapse_onset(const RunLog& log, int window, double threshold) {
    const auto ma = moving_average(target_ratios(log), window);
    for (std::size_t i = 0; i < ma.size(); ++i)
        if (ma[i] < threshold) return log.records[i].step;
    return std::nullopt;
}

std::optional<int> first_above(const RunLog& log, double threshold, int window) {
    const auto ma = moving_average(target_ratios(log), window);
    for (std::size_t i = 0; i < ma.size(); ++i)
        if (ma[i] > threshold) return log.records[i].step;
    return std::nullopt;
}

RunSummary summarize(std::string name, const EnvConfig& env, RunLog log) {
    RunSummary s;
    s.name = std::move(name);
    s.env = env;
    s.onset_step = collapse_onset(log);
    if (!log.records.empty()) {
        s.final_ratio = moving_average(target_ratios(log)).back();
        const std::size_t tail = std::min<std::size_t>(100, log.records.size());
        double acc = 0.0;
        for (std::size_t i = log.records.size() - tail; i < log.records.size(); ++i) acc += log.records[i].accuracy;
        s.final_accuracy = acc / static_cast<double>(tail);
    }
    s.log = std::move(log);
    return s;
}

std::string_view preset_name(Preset p) noexcept {
    switch (p) {
        case Preset::Collapse: return "collapse";
        case Preset::Mitigation: return "mitigation";
        case Preset::Difficulty: return "difficulty";
        case Preset::Recovery: return "recovery";
    }
    return "collapse";
}

Preset parse_preset(std::string_view name) {
    for (auto p : {Preset::Collapse, Preset::Mitigation, Preset::Difficulty, Preset::Recovery})
        if (preset_name(p) == name) return p;
    throw InvalidArgument("unknown preset '" + std::string(name) +
                          "' (valid: collapse, mitigation, difficulty, recovery)");
}

EnvConfig default_env(std::uint64_t seed) {
    EnvConfig env;
    env.seed = seed;
    return env;
}

const RunSummary& Report::run(std::string_view name) const {
    for (const auto& r : runs)
        if (r.name == name) return r;
    throw InvalidArgument("no run named '" + std::string(name) + "' in report");
}

std::optional<std::string> Report::extra_value(std::string_view key) const {
    for (const auto& [k, v] : extra)
        if (k == key) return v;
    return std::nullopt;
}

namespace {

std::vector<RunSummary> run_all(const std::vector<std::pair<std::string, EnvConfig>>& jobs) {
    std::vector<std::future<RunLog>> futures;
    futures.reserve(jobs.size());
    for (const auto& job : jobs) futures.push_back(std::async(std::launch::async, run_training, job.second));
    std::vector<RunSummary> out;
    for (std::size_t i = 0; i < jobs.size(); ++i) out.push_back(summarize(jobs[i].first, jobs[i].second, futures[i].get()));
    return out;
}

std::string opt_step(const std::optional<int>& s) { return s ? std::to_string(*s) : "none"; }

}  // namespace

Report run_experiment(Preset preset, std::uint64_t seed) {
    Report rep;
    rep.preset = preset;
    rep.seed = seed;
    const EnvConfig base = default_env(seed);

    switch (preset) {
        case Preset::Collapse:
            rep.runs = run_all({{"default", base}});
            break;
        case Preset::Mitigation: {
            EnvConfig with = base;
            with.lambda = 0.5;
            rep.runs = run_all({{"lambda0", base}, {"lambda0.5", with}});
            const auto& a = rep.runs[0];
            const auto& b = rep.runs[1];
            rep.extra.emplace_back("accuracy_drop", strf("%.6f", a.final_accuracy - b.final_accuracy));
            break;
        }
        case Preset::Difficulty: {
            EnvConfig hard = base;
            hard.q_hi = 0.6;
            hard.q_lo = 0.1;
            rep.runs = run_all({{"easy", base}, {"hard", hard}});
            rep.extra.emplace_back("easy_onset_step", opt_step(rep.runs[0].onset_step));
            rep.extra.emplace_back("hard_onset_step", opt_step(rep.runs[1].onset_step));
            break;
        }
        case Preset::Recovery: {
            EnvConfig collapse = base;
            collapse.steps = kRecoveryCollapseSteps;
            rep.runs.push_back(summarize("collapse", collapse, run_training(collapse)));
            const auto fell = collapse_onset(rep.runs.back().log, kOnsetWindow, kCollapsedRatio);
            const double collapsed_theta =
                rep.runs.back().log.records.empty() ? base.theta0 : rep.runs.back().log.records.back().theta;

            EnvConfig recover = base;
            recover.steps = kRecoveryMaxSteps;
            recover.lambda = 2.0 * (base.q_hi - base.q_lo);
            recover.theta0 = collapsed_theta;
            recover.seed = seed + 1;
            rep.runs.push_back(summarize("recover", recover, run_training(recover)));
            const auto rose = first_above(rep.runs.back().log, kRecoveredRatio);
            const auto to_collapse = fell ? std::optional<int>(*fell + 1) : std::nullopt;
            const auto to_recover = rose ? std::optional<int>(*rose + 1) : std::nullopt;
            rep.extra.emplace_back("steps_to_collapse", opt_step(to_collapse));
            rep.extra.emplace_back("steps_to_recover", opt_step(to_recover));
            rep.extra.emplace_back("recovery_factor", to_collapse && to_recover
                                                          ? strf("%.6f", static_cast<double>(*to_recover) / *to_collapse)
                                                          : std::string("none"));
            break;
        }
    }
    return rep;
}

std::string format_run_csv(const RunLog& log) {
    std::string out = "step,target_ratio,accuracy,theta\n";
    for (const auto& r : log.records) out += strf("%d,%.6f,%.6f,%.6f\n", r.step, r.target_ratio, r.accuracy, r.theta);
    return out;
}

std::string format_run_summary(const RunSummary& run) {
    std::string out;
    out += "run: " + run.name + "\n";
    out += "onset_step: " + opt_step(run.onset_step) + "\n";
    out += strf("final_ratio: %.6f\n", run.final_ratio);
    out += strf("final_accuracy: %.6f\n", run.final_accuracy);
    out += strf("steps: %zu\n", run.log.records.size());
    out += strf("lambda: %.6f\nq_hi: %.6f\nq_lo: %.6f\n", run.env.lambda, run.env.q_hi, run.env.q_lo);
    out += strf("seed: %llu\n", static_cast<unsigned long long>(run.env.seed));
    if (run.log.error) out += "error: " + *run.log.error + "\n";
    return out;
}

std::string format_report_summary(const Report& report) {
    std::string out = "preset: " + std::string(preset_name(report.preset)) + "\n";
    out += strf("seed: %llu\n", static_cast<unsigned long long>(report.seed));
    for (const auto& r : report.runs) {
        out += r.name + ".onset_step: " + opt_step(r.onset_step) + "\n";
        out += r.name + strf(".final_ratio: %.6f\n", r.final_ratio);
        out += r.name + strf(".final_accuracy: %.6f\n", r.final_accuracy);
    }
    for (const auto& [k, v] : report.extra) out += k + ": " + v + "\n";
    return out;
}

std::vector<std::filesystem::path> write_experiment(const Report& report, const std::filesystem::path& dir) {
    detail::ensure_dir(dir);
    const std::string prefix(preset_name(report.preset));
    std::vector<std::filesystem::path> written;
    for (const auto& r : report.runs) {
        auto csv = dir / (prefix + "_" + r.name + ".csv");
        auto summary = dir / (prefix + "_" + r.name + "_summary.txt");
        detail::write_file(csv, format_run_csv(r.log));
        detail::write_file(summary, format_run_summary(r));
        written.push_back(std::move(csv));
        written.push_back(std::move(summary));
    }
    auto top = dir / (prefix + "_summary.txt");
    detail::write_file(top, format_report_summary(report));
    written.push_back(std::move(top));
    return written;
}

}  // namespace langdrift
