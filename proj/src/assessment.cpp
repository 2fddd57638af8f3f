#include "onramp/assessment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace onramp {

CornerTrack corner_tracks(const Trajectory& traj, Side side) {
    CornerTrack out;
    out.object_id = traj.object_id;
    out.side = side;
    out.times.reserve(traj.states.size());
    out.front.reserve(traj.states.size());
    out.rear.reserve(traj.states.size());
    const double sign = side == Side::Left ? 1.0 : -1.0;
    for (const VehicleState& s : traj.states) {
        const Vec2 fwd{std::cos(s.heading), std::sin(s.heading)};
        const Vec2 lat{-fwd.y, fwd.x};
        const Vec2 c = s.position();
        const Vec2 half_len = (0.5 * s.length) * fwd;
        const Vec2 half_wid = (sign * 0.5 * s.width) * lat;
        out.times.push_back(s.t);
        out.front.push_back(c + half_len + half_wid);
        out.rear.push_back(c - half_len + half_wid);
    }
    return out;
}

namespace {

struct Box {
    double min_x, min_y, max_x, max_y;
    bool overlaps(const Box& o) const {
        return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
    }
};

constexpr std::size_t kChunk = 16;

/// Bounding boxes of consecutive runs of kChunk segments.
std::vector<Box> chunk_boxes(std::span<const Vec2> path) {
    std::vector<Box> boxes;
    if (path.size() < 2) return boxes;
    const std::size_t n_seg = path.size() - 1;
    for (std::size_t s = 0; s < n_seg; s += kChunk) {
        const std::size_t e = std::min(n_seg, s + kChunk);  // last vertex index of the chunk
        Box b{path[s].x, path[s].y, path[s].x, path[s].y};
        for (std::size_t i = s + 1; i <= e; ++i) {
            b.min_x = std::min(b.min_x, path[i].x);
            b.max_x = std::max(b.max_x, path[i].x);
            b.min_y = std::min(b.min_y, path[i].y);
            b.max_y = std::max(b.max_y, path[i].y);
        }
        boxes.push_back(b);
    }
    return boxes;
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace

std::optional<ConflictPoint> first_crossing(std::span<const Vec2> a, std::span<const double> a_times,
                                            std::span<const Vec2> b, std::span<const double> b_times) {
    if (a.size() < 2 || b.size() < 2) return std::nullopt;
    const auto a_boxes = chunk_boxes(a);
    const auto b_boxes = chunk_boxes(b);
    const std::size_t a_seg = a.size() - 1;
    const std::size_t b_seg = b.size() - 1;

    for (std::size_t ca = 0; ca < a_boxes.size(); ++ca) {
        // (position along a, position along b, hit)
        std::optional<std::tuple<double, double, ConflictPoint>> best;
        for (std::size_t cb = 0; cb < b_boxes.size(); ++cb) {
            if (!a_boxes[ca].overlaps(b_boxes[cb])) continue;
            const std::size_t ia_end = std::min(a_seg, (ca + 1) * kChunk);
            const std::size_t ib_end = std::min(b_seg, (cb + 1) * kChunk);
            for (std::size_t i = ca * kChunk; i < ia_end; ++i) {
                for (std::size_t j = cb * kChunk; j < ib_end; ++j) {
                    const auto hit = segment_intersection(a[i], a[i + 1], b[j], b[j + 1]);
                    if (!hit) continue;
                    const double pa = static_cast<double>(i) + hit->u;
                    const double pb = static_cast<double>(j) + hit->v;
                    if (best && std::tie(pa, pb) >= std::tie(std::get<0>(*best), std::get<1>(*best))) continue;
                    ConflictPoint cp;
                    cp.point = hit->point;
                    cp.t_ego = lerp(a_times[i], a_times[i + 1], hit->u);
                    cp.t_challenger = lerp(b_times[j], b_times[j + 1], hit->v);
                    best = std::make_tuple(pa, pb, cp);
                }
            }
        }
        if (best) return std::get<2>(*best);
    }
    return std::nullopt;
}

std::vector<ConflictPoint> find_intersections(const CornerTrack& ego, const CornerTrack& ch) {
    std::vector<ConflictPoint> out;
    for (const auto* ego_path : {&ego.front, &ego.rear}) {
        for (const auto* ch_path : {&ch.front, &ch.rear}) {
            if (auto cp = first_crossing(*ego_path, ego.times, *ch_path, ch.times)) out.push_back(*cp);
        }
    }
    return out;
}

PetResult pet_from_points(std::int64_t challenger_id, std::vector<ConflictPoint> points) {
    PetResult r;
    r.challenger_id = challenger_id;
    r.points = std::move(points);
    r.degenerate = r.points.empty();
    bool any_pos = false;
    bool any_neg = false;
    for (const ConflictPoint& p : r.points) {
        const double dt = p.dt();
        if (!r.pet || std::abs(dt) < std::abs(*r.pet)) r.pet = dt;
        any_pos = any_pos || dt > 0.0;
        any_neg = any_neg || dt < 0.0;
    }
    r.collision_warning = any_pos && any_neg;
    return r;
}

PetResult pet(const Trajectory& ego, const Trajectory& challenger, Side ego_side, Side challenger_side) {
    return pet_from_points(challenger.object_id,
                           find_intersections(corner_tracks(ego, ego_side), corner_tracks(challenger, challenger_side)));
}

std::optional<TimedPosition> state_at(const Trajectory& traj, double t) {
    const auto& st = traj.states;
    if (st.empty() || t < st.front().t || t > st.back().t) return std::nullopt;
    const auto it = std::lower_bound(st.begin(), st.end(), t, [](const VehicleState& s, double v) { return s.t < v; });
    if (it == st.begin()) return TimedPosition{it->position(), it->lane};
    const VehicleState& b = *it;
    const VehicleState& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    return TimedPosition{a.position() + u * (b.position() - a.position()), u < 0.5 ? a.lane : b.lane};
}

std::vector<const Trajectory*> select_challengers(const ScenarioRecord& record, const Trajectory& ego,
                                                  std::span<const Trajectory> all_trajs, const LaneModel& lanes,
                                                  double vicinity_m) {
    std::vector<const Trajectory*> out;
    const int target = lanes.find(record.target_lane);
    if (target < 0 || lanes.lane(target).kind != LaneKind::Mainline) return out;
    const auto ego_at = state_at(ego, record.cross_entry_t);
    if (!ego_at) return out;
    const Polyline& center = lanes.lane(target).centerline;
    const double ego_s = center.project(ego_at->position).s;
    for (const Trajectory& other : all_trajs) {
        if (other.object_id == ego.object_id && other.segment == ego.segment) continue;
        const auto at = state_at(other, record.cross_entry_t);
        if (!at || at->lane != target) continue;
        const double gap = center.project(at->position).s - ego_s;
        if (std::abs(gap) <= vicinity_m) out.push_back(&other);
    }
    return out;
}

}  // namespace onramp
