#include "gpbench/dataset.hpp"

#include "gpbench/hashing.hpp"
#include "gpbench/random.hpp"

#include <algorithm>
#include <optional>
#include <thread>
#include <unordered_set>

namespace gpbench {

std::string_view split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

std::set<std::string> DatasetManifest::fingerprints(Split s) const {
    std::set<std::string> out;
    for (const auto& e : split(s)) out.insert(e.fingerprint);
    return out;
}

nlohmann::json DatasetManifest::to_json() const {
    nlohmann::json j;
    j["schema"] = kSchema;
    j["task"] = task_name(task);
    j["master_seed"] = master_seed;
    nlohmann::json splits_json = nlohmann::json::object();
    for (Split s : kSplits) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : split(s)) {
            nlohmann::json params = nlohmann::json::object();
            for (const auto& p : e.params.entries()) params[p.name] = p.value;
            nlohmann::json truth = std::vector<double>(e.ground_truth.values().begin(), e.ground_truth.values().end());
            arr.push_back({{"id", e.id},
                           {"seed", e.seed},
                           {"fingerprint", e.fingerprint},
                           {"ground_truth", truth},
                           {"vector", e.ground_truth.is_vector()},
                           {"params", params},
                           {"param_order", [&] {
                                nlohmann::json names = nlohmann::json::array();
                                for (const auto& p : e.params.entries()) names.push_back(p.name);
                                return names;
                            }()}});
        }
        splits_json[std::string(split_name(s))] = std::move(arr);
    }
    j["splits"] = std::move(splits_json);
    return j;
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
    if (j.at("schema").get<int>() != kSchema) throw std::runtime_error("manifest: unsupported schema");
    DatasetManifest m;
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw std::runtime_error("manifest: unknown task " + j.at("task").get<std::string>());
    m.task = *task;
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (Split s : kSplits) {
        auto& out = m.splits[static_cast<std::size_t>(s)];
        for (const auto& e : j.at("splits").at(std::string(split_name(s)))) {
            ManifestEntry entry;
            entry.id = e.at("id").get<std::string>();
            entry.seed = e.at("seed").get<std::uint64_t>();
            entry.fingerprint = e.at("fingerprint").get<std::string>();
            auto values = e.at("ground_truth").get<std::vector<double>>();
            entry.ground_truth = e.at("vector").get<bool>() ? GroundTruth::vector(std::move(values))
                                                            : GroundTruth::scalar(values.at(0));
            for (const auto& name : e.at("param_order"))
                entry.params.add(name.get<std::string>(), e.at("params").at(name.get<std::string>()).get<double>());
            out.push_back(std::move(entry));
        }
    }
    return m;
}

std::string DatasetManifest::hash() const { return sha256_hex(to_json().dump()); }

UniquenessCeilingError::UniquenessCeilingError(TaskId task, int achieved, int requested)
    : std::runtime_error("parameter space of " + task_name(task) + " exhausted: only " + std::to_string(achieved) +
                         " unique stimuli of " + std::to_string(requested) + " requested"),
      task_(task),
      achieved_(achieved) {}

std::uint64_t stimulus_seed(TaskId task, std::uint64_t master_seed, std::uint64_t counter) {
    return derive_seed(derive_seed(master_seed, label_hash(task_name(task))), counter);
}

DatasetManifest gen_dataset(TaskId task, std::uint64_t master_seed, const StimulusSink& sink, SplitSizes sizes) {
    DatasetManifest m;
    m.task = task;
    m.master_seed = master_seed;

    const int requested = sizes.total();
    const std::uint64_t max_candidates = static_cast<std::uint64_t>(requested) * 20 + 1000;
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    constexpr std::uint64_t kBatch = 256;

    std::unordered_set<std::string> seen;
    int accepted = 0;
    std::uint64_t counter = 0;
    std::vector<std::optional<Stimulus>> batch(kBatch);
    while (accepted < requested) {
        if (counter >= max_candidates) throw UniquenessCeilingError(task, accepted, requested);
        // Candidates are pure functions of their counter, so they can be built
        // in parallel and accepted in counter order.
        const std::uint64_t first = counter;
        auto build = [&](unsigned w) {
            for (std::uint64_t i = w; i < kBatch; i += workers)
                batch[i] = generate(task, stimulus_seed(task, master_seed, first + i));
        };
        if (workers == 1) {
            build(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(build, w);
        }
        for (std::uint64_t i = 0; i < kBatch && accepted < requested; ++i, ++counter) {
            Stimulus& s = *batch[i];
            std::string fp = s.params.fingerprint();
            if (!seen.insert(fp).second) continue;
            const Split split = accepted < sizes.train                ? Split::Train
                                : accepted < sizes.train + sizes.val ? Split::Val
                                                                      : Split::Test;
            if (sink) sink(split, s);
            m.splits[static_cast<std::size_t>(split)].push_back(
                ManifestEntry{s.id, s.seed, std::move(fp), s.ground_truth, s.params});
            ++accepted;
        }
    }
    return m;
}

Stimulus regenerate(TaskId task, const ManifestEntry& entry) {
    Stimulus s = generate(task, entry.seed);
    if (s.id != entry.id)
        throw std::runtime_error("stimulus " + entry.id + " does not regenerate (got " + s.id +
                                 "); manifest and generator disagree");
    return s;
}

}  // namespace gpbench
