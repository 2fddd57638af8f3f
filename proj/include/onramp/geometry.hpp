#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace onramp {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
    friend Vec2 operator*(Vec2 a, double k) { return {k * a.x, k * a.y}; }
    friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3-D cross product; > 0 when b is counter-clockwise of a.
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

/// Position relative to a reference polyline.
///
/// `s` is the arc length of the foot point, `d` the signed lateral offset
/// (positive to the left of the direction of increasing s). When the foot
/// point falls before the first or after the last vertex, `s` is
/// extrapolated linearly along the terminal segment (negative or larger
/// than the total length) and `extrapolated` is set.
struct FrenetPosition {
    double s = 0.0;
    double d = 0.0;
    bool extrapolated = false;
};

/// Open polyline with cached cumulative arc length.
class Polyline {
public:
    /// Throws std::invalid_argument on fewer than two vertices, repeated
    /// consecutive vertices or non-finite coordinates.
    explicit Polyline(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    double length() const { return cumulative_.back(); }
    /// Arc length at vertex i.
    double arc_length(std::size_t i) const { return cumulative_[i]; }

    /// Point at arc length s; s outside [0, length] extrapolates along the end segments.
    Vec2 point_at(double s) const;
    /// Unit tangent of the segment containing s.
    Vec2 tangent_at(double s) const;

    FrenetPosition project(Vec2 p) const;

private:
    std::size_t segment_for(double s) const;

    std::vector<Vec2> vertices_;
    std::vector<double> cumulative_;
};

inline FrenetPosition project(Vec2 point, const Polyline& line) { return line.project(point); }

enum class LaneKind { Mainline, OnRamp };

struct Lane {
    std::string id;
    LaneKind kind = LaneKind::Mainline;
    Polyline left_border;
    Polyline right_border;
    Polyline centerline;
};

/// Lane geometry of one on-ramp section.
///
/// `merge_start_s` is the arc length of the start line on the on-ramp's
/// left border, `merge_ref_length` the distance from there to the end of
/// the acceleration lane.
class LaneModel {
public:
    /// Validates the invariants (one on-ramp lane, at least one mainline
    /// lane, unique ids, start line inside the border, positive reference
    /// length). Throws InputError.
    LaneModel(std::vector<Lane> lanes, double merge_start_s, double merge_ref_length);

    const std::vector<Lane>& lanes() const { return lanes_; }
    const Lane& lane(int index) const { return lanes_.at(static_cast<std::size_t>(index)); }
    int size() const { return static_cast<int>(lanes_.size()); }
    int on_ramp_index() const { return on_ramp_; }
    const Lane& on_ramp() const { return lanes_[static_cast<std::size_t>(on_ramp_)]; }
    double merge_start_s() const { return merge_start_s_; }
    double merge_ref_length() const { return merge_ref_length_; }

    /// Lane index by id, or -1.
    int find(const std::string& id) const;

    /// Index of the lane containing p (center between the left and right
    /// border, inside the border extents), or -1 when p is off-road. On a
    /// shared marking the lane with the nearer centerline wins.
    int locate(Vec2 p) const;

    /// Signed offset of p from the lane centerline and the lane width
    /// measured through p.
    struct LateralInfo {
        double offset = 0.0;
        double width = 0.0;
        double to_left = 0.0;   ///< signed offset from the left border (<= 0 inside)
        double to_right = 0.0;  ///< signed offset from the right border (>= 0 inside)
    };
    LateralInfo lateral(int lane, Vec2 p) const;

    /// The lane sharing the given lane's left (or right) border, or -1.
    int neighbor(int lane, bool left) const;

private:
    std::vector<Lane> lanes_;
    double merge_start_s_;
    double merge_ref_length_;
    int on_ramp_ = -1;
};

/// (s - merge_start_s) / merge_ref_length for the projection of p onto
/// the on-ramp's left border. 0 at the start line, 1 at the end of the
/// acceleration lane; values beyond 1 are valid.
double normalized_maneuver_position(Vec2 p, const LaneModel& lanes);

struct SegmentHit {
    Vec2 point;
    double u = 0.0;  ///< parameter along [a1, a2]
    double v = 0.0;  ///< parameter along [b1, b2]
    bool degenerate = false;  ///< collinear overlap; point is the overlap midpoint
};

/// Intersection of the closed segments [a1, a2] and [b1, b2].
std::optional<SegmentHit> segment_intersection(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2);

const char* to_string(LaneKind kind);
LaneKind lane_kind_from_string(const std::string& s);

LaneModel load_lane_model(const std::string& path);
LaneModel parse_lane_model(const std::string& json_text);
std::string lane_model_to_json(const LaneModel& lanes);

}  // namespace onramp
