#pragma once

#include "gpbench/canvas.hpp"
#include "gpbench/task.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gpbench {

// Exact answer for one stimulus: a scalar, or a fixed-length vector
// (5 ratios for E2, 2 lengths for E4).
class GroundTruth {
public:
    static GroundTruth scalar(double v) { return GroundTruth(false, {v}); }
    static GroundTruth vector(std::vector<double> v) { return GroundTruth(true, std::move(v)); }

    bool is_vector() const { return vector_; }
    std::span<const double> values() const { return values_; }
    double value() const { return values_.at(0); }
    std::size_t size() const { return values_.size(); }

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;

private:
    GroundTruth(bool is_vec, std::vector<double> v) : vector_(is_vec), values_(std::move(v)) {}

    bool vector_ = false;
    std::vector<double> values_;
};

struct Param {
    std::string name;
    double value = 0.0;

    friend bool operator==(const Param&, const Param&) = default;
};

// Ordered task-specific generation parameters. Together with the task they
// fully determine the clean (pre-noise) rendering.
class StimulusParams {
public:
    void add(std::string name, double value) { entries_.push_back({std::move(name), value}); }
    double get(std::string_view name) const;
    int get_int(std::string_view name) const { return static_cast<int>(get(name)); }
    bool has(std::string_view name) const;
    const std::vector<Param>& entries() const { return entries_; }

    // Canonical "name=value;..." encoding used for leakage checks.
    std::string fingerprint() const;

    friend bool operator==(const StimulusParams&, const StimulusParams&) = default;

private:
    std::vector<Param> entries_;
};

struct Scene {
    Canvas canvas;
    GroundTruth truth;
};

struct Stimulus {
    std::string id;  // content hash of task, encoded image and ground truth
    TaskId task;
    Canvas canvas;   // post-noise
    GroundTruth ground_truth;
    StimulusParams params;
    std::uint64_t seed = 0;
};

struct TruthRange {
    double lo;
    double hi;
};

// Legal ground-truth range per task (each vector component for E2/E4).
TruthRange truth_range(TaskId task);

StimulusParams sample_params(TaskId task, std::uint64_t seed);
Scene render_scene(TaskId task, const StimulusParams& params);
Stimulus generate(TaskId task, std::uint64_t seed);

Stimulus gen_elementary(TaskId variant, std::uint64_t seed);
Stimulus gen_position_angle(TaskId variant, std::uint64_t seed);
Stimulus gen_position_length(TaskId variant, std::uint64_t seed);
Stimulus gen_framed_bars(TaskId variant, std::uint64_t seed);
Stimulus gen_point_cloud(TaskId variant, std::uint64_t seed);

// Five integers in [3, 39] summing to 100 with a unique maximum.
std::array<int, 5> sample_segments(std::uint64_t seed);

// 10 * 10^((i-1)/12) for i in 1..10.
double cm_scale(int i);

// Rendered E3 element height for ladder index i.
int cm_pixel_height(int i);

// Maximum pointwise curvature |x'y'' - y'x''| / |B'|^3 of a cubic Bezier.
double bezier_max_curvature(const std::array<Point, 4>& control);

// E2 ratio vector: marked maximum first (1.0), then the other four in reading order.
std::vector<double> position_angle_truth(TaskId variant, std::span<const int> segments);

}  // namespace gpbench
