#include "gpbench/task.hpp"

namespace gpbench {

namespace {

struct TaskInfo {
    TaskId id;
    Experiment experiment;
    std::string_view variant;
};

constexpr std::array<TaskInfo, kTaskCount> kTasks{{
    {TaskId::PositionCommonScale, Experiment::E1, "position_common_scale"},
    {TaskId::PositionNonAligned, Experiment::E1, "position_nonaligned"},
    {TaskId::Length, Experiment::E1, "length"},
    {TaskId::Direction, Experiment::E1, "direction"},
    {TaskId::Angle, Experiment::E1, "angle"},
    {TaskId::Area, Experiment::E1, "area"},
    {TaskId::Volume, Experiment::E1, "volume"},
    {TaskId::Curvature, Experiment::E1, "curvature"},
    {TaskId::Shading, Experiment::E1, "shading"},
    {TaskId::Pie, Experiment::E2, "pie"},
    {TaskId::Bar, Experiment::E2, "bar"},
    {TaskId::Type1, Experiment::E3, "type1"},
    {TaskId::Type2, Experiment::E3, "type2"},
    {TaskId::Type3, Experiment::E3, "type3"},
    {TaskId::Type4, Experiment::E3, "type4"},
    {TaskId::Type5, Experiment::E3, "type5"},
    {TaskId::Framed, Experiment::E4, "framed"},
    {TaskId::Unframed, Experiment::E4, "unframed"},
    {TaskId::Base10, Experiment::E5, "base10"},
    {TaskId::Base100, Experiment::E5, "base100"},
    {TaskId::Base1000, Experiment::E5, "base1000"},
}};

const TaskInfo& info(TaskId t) { return kTasks[static_cast<std::size_t>(t)]; }

}  // namespace

Experiment experiment_of(TaskId task) { return info(task).experiment; }

std::string_view experiment_name(Experiment e) {
    static constexpr std::array<std::string_view, 5> names{"E1", "E2", "E3", "E4", "E5"};
    return names[static_cast<std::size_t>(e)];
}

std::string_view variant_name(TaskId task) { return info(task).variant; }

std::string task_name(TaskId task) {
    std::string out(experiment_name(experiment_of(task)));
    out += '/';
    out += variant_name(task);
    return out;
}

std::optional<TaskId> parse_task(std::string_view name) {
    for (const auto& t : kTasks) {
        if (task_name(t.id) == name) return t.id;
    }
    return std::nullopt;
}

const std::vector<TaskId>& list_tasks() {
    static const std::vector<TaskId> all = [] {
        std::vector<TaskId> v;
        for (const auto& t : kTasks) v.push_back(t.id);
        return v;
    }();
    return all;
}

std::vector<TaskId> tasks_of(Experiment e) {
    std::vector<TaskId> v;
    for (const auto& t : kTasks)
        if (t.experiment == e) v.push_back(t.id);
    return v;
}

}  // namespace gpbench
