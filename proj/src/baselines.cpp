#include "gpbench/baselines.hpp"

#include <array>

namespace gpbench {

namespace {

// E1 tasks other than angle, area and volume have no quoted figure and are absent.
// E3 keeps only the two quoted endpoints per study (type 1 low, type 5 high).
constexpr std::array kTable{
    HumanBaseline{TaskId::Angle, 3.22, 0.54, "study-a"},
    HumanBaseline{TaskId::Area, 3.64, 0.38, "study-a"},
    HumanBaseline{TaskId::Volume, 5.18, 0.40, "study-a"},
    HumanBaseline{TaskId::Bar, 1.035, 0.115, "study-b"},
    HumanBaseline{TaskId::Pie, 2.05, 0.125, "study-b"},
    HumanBaseline{TaskId::Type1, 1.4, 0.14, "study-b"},
    HumanBaseline{TaskId::Type1, 1.25, 0.175, "study-c"},
    HumanBaseline{TaskId::Type5, 2.72, 0.175, "study-b"},
    HumanBaseline{TaskId::Type5, 2.24, 0.25, "study-c"},
    HumanBaseline{TaskId::Framed, 3.371, 0.741, "study-a"},
    HumanBaseline{TaskId::Unframed, 3.961, 0.454, "study-a"},
    HumanBaseline{TaskId::Base10, 4.0149, 0.5338, "study-a"},
    HumanBaseline{TaskId::Base100, 5.3891, 0.1945, "study-a"},
    HumanBaseline{TaskId::Base1000, 5.4612, 0.2509, "study-a"},
};

}  // namespace

std::span<const HumanBaseline> human_baselines() { return kTable; }

std::vector<HumanBaseline> baselines_for(TaskId task) {
    std::vector<HumanBaseline> out;
    for (const auto& b : kTable)
        if (b.task == task) out.push_back(b);
    return out;
}

}  // namespace gpbench
