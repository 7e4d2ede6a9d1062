#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "langdrift/grpo.hpp"

namespace langdrift {

// One simulated training regime. The competence gap q_hi - q_lo stands in
// for both resource level and task difficulty.
struct EnvConfig {
    int trace_len = 20;
    double q_hi = 0.9;
    double q_lo = 0.5;
    int group_size = 32;
    double lr = 0.2;
    int steps = 500;
    double lambda = 0.0;
    double theta0 = -4.0;
    double bias = 1.0;
    std::uint64_t seed = 0;
    GrpoOptions grpo{};

    void validate() const;
};

// Reproducible generator: std::mt19937_64 (fully specified by the C++
// standard) seeded with the 64-bit seed; uniforms take the top 53 bits,
// u = (x >> 11) * 2^-53, so streams match across platforms and standard
// libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

// q(r) = q_lo + (q_hi - q_lo) * r
double env_accuracy_prob(double hi_ratio, const EnvConfig& env) noexcept;

// Each position is Hi with probability sigma(theta + bias); the answer is
// correct with probability q(hi_ratio); reward = 1{correct} + lambda * (1 - hi_ratio).
Rollout sample_rollout(const PolicyParams& policy, const EnvConfig& env, Rng& rng);

// G rollouts from one policy with advantages assigned.
GroupSample sample_group(const PolicyParams& policy, const EnvConfig& env, Rng& rng);

struct StepRecord {
    int step = 0;
    double target_ratio = 0.0;  // mean (1 - hi_ratio) over the group
    double accuracy = 0.0;      // fraction of correct rollouts in the group
    double theta = 0.0;         // after this step's update
};

struct RunLog {
    std::vector<StepRecord> records;
    // Set when the run stopped early on a numeric error; records up to that
    // point are kept.
    std::optional<std::string> error;
};

RunLog run_training(const EnvConfig& env);

inline constexpr int kOnsetWindow = 25;
inline constexpr double kOnsetThreshold = 0.5;

// Trailing moving average; the first window-1 entries average what exists.
std::vector<double> moving_average(const std::vector<double>& xs, int window = kOnsetWindow);
std::vector<double> target_ratios(const RunLog& log);

// First step whose trailing moving average of the target ratio drops below
// `threshold`.
std::optional<int> collapse_onset(const RunLog& log, int window = kOnsetWindow, double threshold = kOnsetThreshold);

// First step whose trailing moving average rises above `threshold`.
std::optional<int> first_above(const RunLog& log, double threshold, int window = kOnsetWindow);

struct RunSummary {
    std::string name;
    EnvConfig env;
    RunLog log;
    std::optional<int> onset_step;
    double final_ratio = 0.0;     // moving average at the last step
    double final_accuracy = 0.0;  // mean accuracy over the last 100 steps
};

RunSummary summarize(std::string name, const EnvConfig& env, RunLog log);

enum class Preset { Collapse, Mitigation, Difficulty, Recovery };

std::string_view preset_name(Preset p) noexcept;
// Throws InvalidArgument naming the valid presets.
Preset parse_preset(std::string_view name);

// Env used by every preset before its own overrides (easy task, lambda 0).
EnvConfig default_env(std::uint64_t seed);

inline constexpr int kRecoveryCollapseSteps = 1500;
inline constexpr int kRecoveryMaxSteps = 4000;
inline constexpr double kRecoveredRatio = 0.8;
inline constexpr double kCollapsedRatio = 1.0 - kRecoveredRatio;

struct Report {
    Preset preset = Preset::Collapse;
    std::uint64_t seed = 0;
    std::vector<RunSummary> runs;
    // Preset-level results such as steps_to_recover; emitted in order.
    std::vector<std::pair<std::string, std::string>> extra;

    const RunSummary& run(std::string_view name) const;
    std::optional<std::string> extra_value(std::string_view key) const;
};

// collapse:   easy task, lambda 0.
// mitigation: paired lambda 0 / lambda 0.5 runs.
// difficulty: easy {0.9, 0.5} vs hard {0.6, 0.1}, lambda 0.
// recovery:   lambda 0 for kRecoveryCollapseSteps, then continues from the
//             collapsed theta with lambda = 2 (q_hi - q_lo) so the net
//             language pressure mirrors the accuracy pressure.
Report run_experiment(Preset preset, std::uint64_t seed);

std::string format_run_csv(const RunLog& log);
std::string format_run_summary(const RunSummary& run);
std::string format_report_summary(const Report& report);

// Writes <preset>_<run>.csv and <preset>_<run>_summary.txt per run plus
// <preset>_summary.txt; returns the paths written.
std::vector<std::filesystem::path> write_experiment(const Report& report, const std::filesystem::path& dir);

}  // namespace langdrift
