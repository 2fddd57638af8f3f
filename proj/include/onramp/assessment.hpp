#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "onramp/geometry.hpp"
#include "onramp/ingest.hpp"
#include "onramp/scenario.hpp"

namespace onramp {

enum class Side { Left, Right };

/// Paths of a vehicle's front and rear corner on one side.
struct CornerTrack {
    std::int64_t object_id = 0;
    Side side = Side::Left;
    std::vector<double> times;
    std::vector<Vec2> front;
    std::vector<Vec2> rear;
};

/// Corners at center +- length/2 along the heading, shifted width/2 to the
/// chosen side.
CornerTrack corner_tracks(const Trajectory& traj, Side side);

/// First crossing of two timed paths, with arrival times interpolated
/// linearly inside the crossing segments. "First" is earliest along
/// path `a`, then along `b`.
std::optional<ConflictPoint> first_crossing(std::span<const Vec2> a, std::span<const double> a_times,
                                            std::span<const Vec2> b, std::span<const double> b_times);

/// Conflict points for the four pairs (ego front, ego rear) x
/// (challenger front, challenger rear), in that order. Pairs whose paths
/// never cross are omitted.
std::vector<ConflictPoint> find_intersections(const CornerTrack& ego, const CornerTrack& challenger);

/// PET from already computed conflict points.
PetResult pet_from_points(std::int64_t challenger_id, std::vector<ConflictPoint> points);

/// PET between a merging ego (left corners) and a challenger (right
/// corners). The sides can be swapped for mirrored situations.
PetResult pet(const Trajectory& ego, const Trajectory& challenger, Side ego_side = Side::Left,
              Side challenger_side = Side::Right);

/// Vehicles on the record's target lane whose longitudinal gap to the ego,
/// measured along the target-lane centerline at the Cross-entry time, is
/// within +-vicinity. The ego itself is never returned.
std::vector<const Trajectory*> select_challengers(const ScenarioRecord& record, const Trajectory& ego,
                                                  std::span<const Trajectory> all_trajs, const LaneModel& lanes,
                                                  double vicinity_m = 100.0);

struct TimedPosition {
    Vec2 position;
    int lane = kOffRoad;
};

/// Position linearly interpolated at time t; the lane of the nearer
/// sample. Empty when t is outside the trajectory's time span.
std::optional<TimedPosition> state_at(const Trajectory& traj, double t);

}  // namespace onramp
