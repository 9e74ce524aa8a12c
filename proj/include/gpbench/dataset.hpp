#pragma once

#include "gpbench/stimulus.hpp"
#include "gpbench/task.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpbench {

enum class Split { Train, Val, Test };
inline constexpr std::array<Split, 3> kSplits{Split::Train, Split::Val, Split::Test};
std::string_view split_name(Split s);

struct SplitSizes {
    int train = 5000;
    int val = 1000;
    int test = 55;

    int of(Split s) const { return s == Split::Train ? train : s == Split::Val ? val : test; }
    int total() const { return train + val + test; }
};

struct ManifestEntry {
    std::string id;
    std::uint64_t seed = 0;
    std::string fingerprint;
    GroundTruth ground_truth = GroundTruth::scalar(0);
    StimulusParams params;
};

struct DatasetManifest {
    static constexpr int kSchema = 1;

    TaskId task = TaskId::Length;
    std::uint64_t master_seed = 0;
    std::array<std::vector<ManifestEntry>, 3> splits;

    const std::vector<ManifestEntry>& split(Split s) const { return splits[static_cast<std::size_t>(s)]; }
    std::set<std::string> fingerprints(Split s) const;

    nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& j);
    // sha256 of the canonical JSON dump.
    std::string hash() const;
};

class UniquenessCeilingError : public std::runtime_error {
public:
    UniquenessCeilingError(TaskId task, int achieved, int requested);
    TaskId task() const { return task_; }
    int achieved() const { return achieved_; }

private:
    TaskId task_;
    int achieved_;
};

// Per-stimulus seed for candidate number `counter`; independent of generation order.
std::uint64_t stimulus_seed(TaskId task, std::uint64_t master_seed, std::uint64_t counter);

using StimulusSink = std::function<void(Split, const Stimulus&)>;

// Draws candidates counter = 0, 1, 2, ... and keeps those whose parameter
// fingerprint has not been seen, filling train, then val, then test.
DatasetManifest gen_dataset(TaskId task, std::uint64_t master_seed, const StimulusSink& sink = {},
                            SplitSizes sizes = {});

// Rebuilds the stimulus behind a manifest entry and checks its content id.
Stimulus regenerate(TaskId task, const ManifestEntry& entry);

}  // namespace gpbench
