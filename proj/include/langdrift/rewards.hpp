#pragma once

#include <string_view>

#include "langdrift/script_metrics.hpp"

namespace langdrift {

struct RewardConfig {
    ScriptClass target_script = ScriptClass::Latin;
    double lambda = 0.5;
    double accuracy_weight = 1.0;

    // Throws InvalidArgument on a non-concrete target, negative lambda or
    // non-positive accuracy weight.
    void validate() const;
};

double accuracy_reward(std::string_view completion, std::string_view gold);

// Word share of `target` among counted tokens; 0 for text with none.
double language_consistency_reward(std::string_view completion, ScriptClass target,
                                   const ScriptConfig& scripts = ScriptConfig::defaults());

// accuracy_weight * accuracy + lambda * consistency.
double combined_reward(std::string_view completion, std::string_view gold, const RewardConfig& cfg);

}  // namespace langdrift
