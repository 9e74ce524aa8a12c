#pragma once

#include "json.hpp"

#include <string>

namespace gpbench {

// One model answer to one stimulus, as received.
struct RawResponse {
    std::string text;
    double latency_ms = 0.0;
    std::string model_id;
    std::string stimulus_id;
    std::string task;  // task name, e.g. "E1/length"
    int run_index = 1;
    bool from_cache = false;
};

void to_json(nlohmann::json& j, const RawResponse& r);
void from_json(const nlohmann::json& j, RawResponse& r);

}  // namespace gpbench
