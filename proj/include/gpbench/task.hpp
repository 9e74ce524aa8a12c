#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gpbench {

enum class Experiment { E1, E2, E3, E4, E5 };

// One benchmark task. The enumerator order is the canonical listing order.
enum class TaskId {
    // E1: elementary perceptual tasks
    PositionCommonScale,
    PositionNonAligned,
    Length,
    Direction,
    Angle,
    Area,
    Volume,
    Curvature,
    Shading,
    // E2: position-angle
    Pie,
    Bar,
    // E3: position-length
    Type1,
    Type2,
    Type3,
    Type4,
    Type5,
    // E4: bars and framed rectangles
    Framed,
    Unframed,
    // E5: Weber point clouds
    Base10,
    Base100,
    Base1000,
};

inline constexpr std::size_t kTaskCount = 21;

Experiment experiment_of(TaskId task);
std::string_view experiment_name(Experiment e);

// "E1/length", "E2/pie", "E3/type4", ...
std::string task_name(TaskId task);
std::string_view variant_name(TaskId task);
std::optional<TaskId> parse_task(std::string_view name);

const std::vector<TaskId>& list_tasks();
std::vector<TaskId> tasks_of(Experiment e);

}  // namespace gpbench
