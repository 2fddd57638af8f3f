#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "onramp/geometry.hpp"
#include "onramp/ingest.hpp"

namespace onramp {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Parameters of the synthetic on-ramp scene.
///
/// Geometry: two straight mainline lanes (`main_1` right, `main_2` left)
/// along +x and an on-ramp lane (`ramp`) to the right of `main_1` running
/// from x = 0 to x = ramp_length. The start line sits at merge_start_s on
/// the ramp's left border. Normalized positions below follow
/// normalized_maneuver_position.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_mainline = 150;
    int n_merging = 40;
    int n_aborting = 10;
    /// Merges that start late on the ramp and sweep across both mainline
    /// lanes in one motion.
    int n_late_merges = 0;

    double lane_width = 3.75;
    double ramp_length = 300.0;
    double merge_start_s = 50.0;
    double mainline_begin = -100.0;
    double mainline_end = 600.0;
    double vertex_spacing = 5.0;

    Range right_lane_speed{22.0, 28.0};
    Range left_lane_speed{28.0, 34.0};
    Range ramp_speed{20.0, 28.0};
    Range mainline_headway_s{1.5, 4.0};
    Range ramp_headway_s{3.0, 6.0};
    double mainline_lateral_bias = 0.2;  ///< m, uniform +-
    double truck_fraction = 0.15;

    /// Normalized position where a merge leaves its lane center (0.2 lane
    /// widths of lateral offset) ...
    Range merge_start_pos{0.05, 0.55};
    /// ... and the normalized distance until it is within 0.25 lane widths
    /// of the target center.
    Range merge_span{0.15, 0.40};
    Range abort_start_pos{0.05, 0.55};
    Range abort_span{0.15, 0.35};
    Range abort_peak{0.45, 0.60};  ///< lane widths
    Range late_start_pos{0.62, 0.75};
    Range late_end_pos{1.40, 1.60};

    double noise_std = 0.0;  ///< m, on x and y
    double rate_hz = 25.0;

    /// Throws InputError on negative counts, negative noise or a non-positive rate.
    void validate() const;
};

enum class TruthLabel { None, Merge, Abort };
const char* to_string(TruthLabel l);

struct TruthChallenger {
    std::int64_t challenger_id = 0;
    double pet = 0.0;  ///< from the closed-form kinematics
};

struct GroundTruth {
    std::int64_t object_id = 0;
    TruthLabel label = TruthLabel::None;
    bool late = false;
    /// Normalized positions where lateral motion becomes significant
    /// (0.2 lane widths) and where the vehicle settles (merge: within 0.25
    /// lane widths of the target center; abort: back below 0.2).
    std::optional<double> start_pos;
    std::optional<double> end_pos;
    std::optional<std::int64_t> start_frame;
    std::optional<std::int64_t> end_frame;
    /// Every straight-driving vehicle on the lane left of the ramp whose
    /// corner paths cross the ego's.
    std::vector<TruthChallenger> challengers;
};

struct LabeledDataset {
    std::vector<Trajectory> trajectories;
    LaneModel lanes;
    std::vector<GroundTruth> labels;
};

LaneModel synth_lane_model(const SynthConfig& cfg);

/// Deterministic for a given config (including seed).
LabeledDataset generate(const SynthConfig& cfg);

/// A single merge into main_1 plus one main_1 vehicle at the same speed,
/// placed so that the closed-form PET equals `pet_s` (positive: the ego
/// merges behind). Uses cfg for geometry, rate and noise only.
LabeledDataset pet_fixture(const SynthConfig& cfg, double pet_s, double speed = 25.0, double start_pos = 0.3);

std::string labels_to_json(const std::vector<GroundTruth>& labels);
std::vector<GroundTruth> parse_labels(const std::string& json_text);
std::vector<GroundTruth> load_labels(const std::string& path);

/// Writes trajectories.csv, lanes.json and labels.json into `dir`.
void write_dataset(const LabeledDataset& ds, const std::string& dir);

}  // namespace onramp
