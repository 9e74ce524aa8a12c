#pragma once

#include "gpbench/task.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace gpbench {

// Published human performance on the same tasks. Read-only.
struct HumanBaseline {
    TaskId task;
    double mlae;
    double sd;
    std::string_view source;  // citation tag
};

std::span<const HumanBaseline> human_baselines();
std::vector<HumanBaseline> baselines_for(TaskId task);

}  // namespace gpbench
