#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "onramp/geometry.hpp"
#include "onramp/ingest.hpp"
#include "onramp/synth.hpp"

namespace testing {

using namespace onramp;

/// Straight scene from the synthetic generator: main_1 (index 0) and
/// main_2 (1) along +x, ramp (2) to the right of main_1.
inline LaneModel straight_scene(double lane_width = 3.75) {
    SynthConfig cfg;
    cfg.lane_width = lane_width;
    return synth_lane_model(cfg);
}

struct Sample {
    double t;
    double x;
    double y;
    double heading = 0.0;
};

inline Trajectory make_trajectory(std::int64_t id, const std::vector<Sample>& samples, double width = 2.0,
                                  double length = 4.0) {
    Trajectory traj;
    traj.object_id = id;
    std::int64_t frame = 0;
    for (const Sample& s : samples) {
        VehicleState st;
        st.frame = frame++;
        st.t = s.t;
        st.x = s.x;
        st.y = s.y;
        st.heading = s.heading;
        st.width = width;
        st.length = length;
        traj.states.push_back(st);
    }
    return traj;
}

/// Constant-velocity straight track sampled at `rate` Hz.
inline Trajectory straight_track(std::int64_t id, Vec2 start, Vec2 velocity, double t0, double t1, double rate,
                                 double width = 2.0, double length = 4.0) {
    std::vector<Sample> samples;
    const double heading = std::atan2(velocity.y, velocity.x);
    const auto n = static_cast<int>(std::llround((t1 - t0) * rate));
    for (int k = 0; k <= n; ++k) {
        const double t = t0 + k / rate;
        const Vec2 p = start + (t - t0) * velocity;
        samples.push_back({t, p.x, p.y, heading});
    }
    return make_trajectory(id, samples, width, length);
}

inline Vec2 rotate(Vec2 p, double angle, Vec2 shift) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return Vec2{c * p.x - s * p.y, s * p.x + c * p.y} + shift;
}

inline Polyline transform_line(const Polyline& line, double angle, Vec2 shift, double scale = 1.0) {
    std::vector<Vec2> v;
    for (Vec2 p : line.vertices()) v.push_back(rotate(scale * p, angle, shift));
    return Polyline(v);
}

inline LaneModel transform_scene(const LaneModel& m, double angle, Vec2 shift, double scale = 1.0) {
    std::vector<Lane> lanes;
    for (const Lane& l : m.lanes()) {
        lanes.push_back(Lane{l.id, l.kind, transform_line(l.left_border, angle, shift, scale),
                             transform_line(l.right_border, angle, shift, scale),
                             transform_line(l.centerline, angle, shift, scale)});
    }
    return LaneModel(std::move(lanes), scale * m.merge_start_s(), scale * m.merge_ref_length());
}

inline Trajectory transform_trajectory(Trajectory t, double angle, Vec2 shift) {
    for (VehicleState& s : t.states) {
        const Vec2 p = rotate(s.position(), angle, shift);
        s.x = p.x;
        s.y = p.y;
        s.heading += angle;
    }
    return t;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Fresh directory below the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("onramp_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline SynthConfig only(int merging, int aborting, int mainline = 0) {
    SynthConfig cfg;
    cfg.n_mainline = mainline;
    cfg.n_merging = merging;
    cfg.n_aborting = aborting;
    return cfg;
}

}  // namespace testing
