#include "langdrift/grpo.hpp"

#include <cmath>
#include <string>

#include "langdrift/error.hpp"

namespace langdrift {

double logistic(double x) noexcept {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

std::vector<double> group_advantages(std::span<const double> rewards, double eps) {
    if (rewards.size() < 2)
        throw InvalidArgument("invalid group: need at least 2 rewards, got " + std::to_string(rewards.size()));
    if (!(eps > 0.0)) throw InvalidArgument("advantage eps must be > 0");

    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double denom = std::max(std::sqrt(var / n), eps);

    std::vector<double> adv;
    adv.reserve(rewards.size());
    for (double r : rewards) adv.push_back((r - mean) / denom);
    return adv;
}

void assign_advantages(GroupSample& group, double eps) {
    std::vector<double> rewards;
    rewards.reserve(group.rollouts.size());
    for (const auto& r : group.rollouts) rewards.push_back(r.reward);
    group.advantages = group_advantages(rewards, eps);
}

double logprob_grad(const PolicyParams& policy, std::span<const Lang> trace) {
    const double p = policy.hi_prob();
    double g = 0.0;
    for (Lang l : trace) g += (l == Lang::Hi ? 1.0 : 0.0) - p;
    return g;
}

double trace_log_likelihood(const PolicyParams& policy, std::span<const Lang> trace) {
    // log sigma(x) = -log1p(exp(-x)), log(1 - sigma(x)) = -log1p(exp(x))
    const double x = policy.theta + policy.bias;
    auto log_sigmoid = [](double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); };
    const double log_hi = log_sigmoid(x);
    const double log_lo = log_sigmoid(-x);
    double ll = 0.0;
    for (Lang l : trace) ll += l == Lang::Hi ? log_hi : log_lo;
    return ll;
}

PolicyParams grpo_step(const PolicyParams& policy, const GroupSample& group, double lr, const GrpoOptions& opts) {
    const auto g = group.rollouts.size();
    if (g < 2) throw InvalidArgument("invalid group: need at least 2 rollouts");
    if (group.advantages.size() != g) throw InvalidArgument("group advantages not populated");
    if (!(lr >= 0.0)) throw InvalidArgument("learning rate must be >= 0");
    if (opts.epochs < 1) throw InvalidArgument("epochs must be >= 1");

    const double old_p = policy.hi_prob();
    PolicyParams cur = policy;
    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        double grad = 0.0;
        if (epoch == 0) {
            for (std::size_t i = 0; i < g; ++i)
                grad += group.advantages[i] * logprob_grad(cur, group.rollouts[i].trace_langs);
        } else {
            const double p = cur.hi_prob();
            const double hi_ratio = p / old_p;
            const double lo_ratio = (1.0 - p) / (1.0 - old_p);
            for (std::size_t i = 0; i < g; ++i) {
                const double a = group.advantages[i];
                double gi = 0.0;
                for (Lang l : group.rollouts[i].trace_langs) {
                    const double ratio = l == Lang::Hi ? hi_ratio : lo_ratio;
                    const bool clipped =
                        opts.clip && ((a > 0 && ratio > 1.0 + opts.clip_eps) || (a < 0 && ratio < 1.0 - opts.clip_eps));
                    if (!clipped) gi += ratio * ((l == Lang::Hi ? 1.0 : 0.0) - p);
                }
                grad += a * gi;
            }
        }
        cur.theta += lr * grad / static_cast<double>(g);
        if (!std::isfinite(cur.theta)) throw NumericError("non-finite theta after GRPO update");
    }
    return cur;
}

}  // namespace langdrift
