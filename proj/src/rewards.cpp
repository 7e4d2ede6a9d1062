#include "langdrift/rewards.hpp"

#include <cmath>

#include "langdrift/answer_verify.hpp"
#include "langdrift/error.hpp"

namespace langdrift {

void RewardConfig::validate() const {
    if (!is_concrete_script(target_script))
        throw InvalidArgument("reward target must be hangul, latin, cjk or cyrillic, got " +
                              std::string(script_name(target_script)));
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be a finite value >= 0");
    if (!(accuracy_weight > 0.0) || !std::isfinite(accuracy_weight))
        throw InvalidArgument("accuracy_weight must be a finite value > 0");
}

double accuracy_reward(std::string_view completion, std::string_view gold) {
    return is_correct(completion, gold) ? 1.0 : 0.0;
}

double language_consistency_reward(std::string_view completion, ScriptClass target, const ScriptConfig& scripts) {
    if (!is_concrete_script(target)) throw InvalidArgument("consistency target must be a concrete script");
    return composition(completion, scripts).word(target);
}

double combined_reward(std::string_view completion, std::string_view gold, const RewardConfig& cfg) {
    cfg.validate();
    const double acc = accuracy_reward(completion, gold);
    if (cfg.lambda == 0.0) return cfg.accuracy_weight * acc;
    return cfg.accuracy_weight * acc + cfg.lambda * language_consistency_reward(completion, cfg.target_script);
}

}  // namespace langdrift
