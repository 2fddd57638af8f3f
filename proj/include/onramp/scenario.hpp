#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "onramp/geometry.hpp"

namespace onramp {

/// A point where an ego corner path crosses a challenger corner path.
struct ConflictPoint {
    Vec2 point;
    double t_ego = 0.0;
    double t_challenger = 0.0;
    double dt() const { return t_ego - t_challenger; }
};

/// Post-encroachment time between the ego and one challenger.
///
/// `pet` is the arrival-time difference t_ego - t_challenger of minimum
/// magnitude over the conflict points; positive when the ego arrives after
/// the challenger. Empty (and `degenerate` set) when no corner paths cross.
struct PetResult {
    std::int64_t challenger_id = 0;
    std::vector<ConflictPoint> points;
    std::optional<double> pet;
    bool degenerate = true;
    /// Arrival order differs between conflict points, i.e. both vehicles
    /// occupied the conflict area at the same time.
    bool collision_warning = false;
};

enum class Category { Free, InFront, Behind, Into, Ambiguous };

const char* to_string(Category c);
Category category_from_string(const std::string& s);

/// One extracted maneuver; the pipeline's unit of output.
struct ScenarioRecord {
    std::int64_t object_id = 0;
    int segment = 0;
    std::string pattern_class;
    bool merge_family = false;
    double similarity = 0.0;

    // Context window and core (Cross/Change) window, as dataset frame numbers.
    std::int64_t frame_start = 0;
    std::int64_t frame_end = 0;
    std::int64_t core_frame_start = 0;
    std::int64_t core_frame_end = 0;
    double t_start = 0.0;
    double t_end = 0.0;

    std::int64_t maneuver_start_frame = 0;
    std::int64_t maneuver_end_frame = 0;
    std::int64_t cross_entry_frame = 0;
    double cross_entry_t = 0.0;
    double maneuver_start_pos = 0.0;
    double maneuver_end_pos = 0.0;

    std::string source_lane;
    std::string target_lane;  ///< empty when no adjacent lane exists
    bool reanchored = false;  ///< the ego settled on the target lane
    std::string direction;    ///< "left" or "right"

    std::vector<PetResult> challengers;
    Category category = Category::Free;
    bool critical = false;
    std::optional<double> accepted_gap;
};

}  // namespace onramp
