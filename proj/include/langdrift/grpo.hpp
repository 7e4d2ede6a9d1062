#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace langdrift {

// Language of one reasoning-trace position in the two-language toy model:
// Hi is the dominant pre-training language, Lo the prompt's target language.
enum class Lang : std::uint8_t { Hi, Lo };

double logistic(double x) noexcept;

struct PolicyParams {
    double theta = 0.0;  // learnable language logit
    double bias = 0.0;   // fixed pre-training prior toward Hi

    // Per-position probability of emitting Hi.
    double hi_prob() const noexcept { return logistic(theta + bias); }
};

struct Rollout {
    std::vector<Lang> trace_langs;
    double hi_ratio = 0.0;
    bool correct = false;
    double reward = 0.0;
};

struct GroupSample {
    std::vector<Rollout> rollouts;
    std::vector<double> advantages;
};

inline constexpr double kAdvantageEps = 1e-8;

// (R_i - mean) / max(population std, eps). Throws InvalidArgument for
// groups smaller than two.
std::vector<double> group_advantages(std::span<const double> rewards, double eps = kAdvantageEps);

// Fills group.advantages from the rollouts' rewards.
void assign_advantages(GroupSample& group, double eps = kAdvantageEps);

// d/dtheta of the trace log-likelihood: sum_t (1{Hi} - sigma(theta + bias)).
double logprob_grad(const PolicyParams& policy, std::span<const Lang> trace);

double trace_log_likelihood(const PolicyParams& policy, std::span<const Lang> trace);

struct GrpoOptions {
    // Extra inner epochs over the same group with a PPO-style per-position
    // ratio clip. With epochs == 1 the ratio is identically 1 and clipping
    // has no effect.
    bool clip = false;
    double clip_eps = 0.2;
    int epochs = 1;
};

// theta' = theta + lr / G * sum_i A_i * logprob_grad(trace_i); bias is
// carried over unchanged. Throws NumericError if theta' is not finite.
PolicyParams grpo_step(const PolicyParams& policy, const GroupSample& group, double lr,
                       const GrpoOptions& opts = {});

}  // namespace langdrift
