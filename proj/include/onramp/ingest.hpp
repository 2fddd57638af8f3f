#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onramp/geometry.hpp"

namespace onramp {

/// Lane association of a frame whose center lies outside every lane.
inline constexpr int kOffRoad = -1;

struct VehicleState {
    std::int64_t frame = 0;
    double t = 0.0;        // s
    double x = 0.0;        // m, center
    double y = 0.0;
    double heading = 0.0;  // rad
    std::optional<double> v;  // m/s
    double width = 0.0;
    double length = 0.0;
    int lane = kOffRoad;   // index into LaneModel::lanes(), or kOffRoad

    Vec2 position() const { return {x, y}; }
    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

enum class ObjectClass { Car, Truck, Other };
enum class RoadAssociation { OnRamp, Highway };

struct Trajectory {
    std::int64_t object_id = 0;
    /// Index of the piece when a sampling gap split the object's track.
    int segment = 0;
    ObjectClass object_class = ObjectClass::Car;
    std::vector<VehicleState> states;
    RoadAssociation source_road = RoadAssociation::Highway;

    friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

const char* to_string(ObjectClass c);
ObjectClass object_class_from_string(const std::string& s);
const char* to_string(RoadAssociation r);

/// Parses the trajectory CSV (`object_id,frame,t,x,y,heading,v,width,length,class`).
///
/// Rows are grouped by object and sorted by time; an object's track is
/// split wherever the sampling gap exceeds 3x its median period. Lane
/// association and road association are filled in from `lanes`.
/// Throws ParseError naming the offending line.
std::vector<Trajectory> parse_trajectories(std::istream& in, const LaneModel& lanes,
                                           const std::string& source_name = "<trajectories>");

struct Dataset {
    std::vector<Trajectory> trajectories;
    LaneModel lanes;
};

Dataset load_dataset(const std::string& trajectory_file, const std::string& lane_file);

/// Writes trajectories in the CSV format read by parse_trajectories.
/// Numbers use the shortest round-trip representation.
void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories);

/// Center path length (sum of frame-to-frame displacements).
double path_length(const Trajectory& traj);

/// Keeps trajectories whose path length exceeds half the on-ramp left-border length.
std::vector<Trajectory> filter_clipped(std::vector<Trajectory> trajs, const LaneModel& lanes);

/// OnRamp iff the first associated lane is the on-ramp lane and the last
/// associated lane is a mainline lane. Off-road frames are skipped.
RoadAssociation associate_road(const Trajectory& traj, const LaneModel& lanes);

/// Fills VehicleState::lane for every state.
void associate_lanes(Trajectory& traj, const LaneModel& lanes);

/// Formats a double with the shortest representation that parses back
/// to the same value.
std::string format_double(double v);

}  // namespace onramp
