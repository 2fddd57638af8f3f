#include "onramp/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "onramp/errors.hpp"

namespace onramp {

Polyline::Polyline(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
        throw std::invalid_argument("polyline needs at least two vertices");
    }
    cumulative_.reserve(vertices_.size());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const Vec2 a = vertices_[i - 1];
        const Vec2 b = vertices_[i];
        if (!std::isfinite(b.x) || !std::isfinite(b.y) || !std::isfinite(a.x) || !std::isfinite(a.y)) {
            throw std::invalid_argument("polyline vertex is not finite");
        }
        const double len = distance(a, b);
        if (!(len > 0.0)) {
            throw std::invalid_argument("polyline has repeated vertex at index " + std::to_string(i));
        }
        cumulative_.push_back(cumulative_.back() + len);
    }
}

std::size_t Polyline::segment_for(double s) const {
    // Segment i spans [cumulative_[i], cumulative_[i + 1]].
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    if (it == cumulative_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    return std::min(idx, vertices_.size() - 2);
}

Vec2 Polyline::point_at(double s) const {
    const std::size_t i = segment_for(s);
    const Vec2 a = vertices_[i];
    const Vec2 b = vertices_[i + 1];
    const double seg_len = cumulative_[i + 1] - cumulative_[i];
    const double t = (s - cumulative_[i]) / seg_len;
    return a + t * (b - a);
}

Vec2 Polyline::tangent_at(double s) const {
    const std::size_t i = segment_for(s);
    const Vec2 dir = vertices_[i + 1] - vertices_[i];
    return (1.0 / norm(dir)) * dir;
}

FrenetPosition Polyline::project(Vec2 p) const {
    const std::size_t n_seg = vertices_.size() - 1;
    double best_dist = std::numeric_limits<double>::infinity();
    FrenetPosition best;
    std::size_t best_seg = 0;
    Vec2 best_foot;

    for (std::size_t i = 0; i < n_seg; ++i) {
        const Vec2 a = vertices_[i];
        const Vec2 seg = vertices_[i + 1] - a;
        const double len2 = dot(seg, seg);
        double t = dot(p - a, seg) / len2;
        bool extrapolated = false;
        if (t < 0.0) {
            if (i == 0) {
                extrapolated = true;
            } else {
                t = 0.0;
            }
        } else if (t > 1.0) {
            if (i + 1 == n_seg) {
                extrapolated = true;
            } else {
                t = 1.0;
            }
        }
        const Vec2 foot = a + t * seg;
        const double dist = distance(p, foot);
        // Strict comparison keeps the earliest (smallest s) segment on ties.
        if (dist < best_dist) {
            best_dist = dist;
            best_seg = i;
            best_foot = foot;
            best.s = cumulative_[i] + t * (cumulative_[i + 1] - cumulative_[i]);
            best.extrapolated = extrapolated;
        }
    }

    const Vec2 rel = p - best_foot;
    double side = cross(vertices_[best_seg + 1] - vertices_[best_seg], rel);
    if (side == 0.0 && best_dist > 0.0) {
        // p lies on the extension of the chosen segment; the neighbouring
        // segment decides the side.
        const std::size_t other = best_seg + 1 < n_seg ? best_seg + 1 : (best_seg > 0 ? best_seg - 1 : best_seg);
        side = cross(vertices_[other + 1] - vertices_[other], rel);
    }
    best.d = side < 0.0 ? -best_dist : best_dist;
    if (side == 0.0) best.d = 0.0;
    return best;
}

namespace {

constexpr double kOnBorderTol = 1e-9;

}  // namespace

LaneModel::LaneModel(std::vector<Lane> lanes, double merge_start_s, double merge_ref_length)
    : lanes_(std::move(lanes)), merge_start_s_(merge_start_s), merge_ref_length_(merge_ref_length) {
    int n_mainline = 0;
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (lanes_[j].id == lanes_[i].id) throw InputError("duplicate lane id '" + lanes_[i].id + "'");
        }
        if (lanes_[i].kind == LaneKind::OnRamp) {
            if (on_ramp_ >= 0) throw InputError("lane model has more than one on-ramp lane");
            on_ramp_ = static_cast<int>(i);
        } else {
            ++n_mainline;
        }
    }
    if (on_ramp_ < 0) throw InputError("lane model has no on-ramp lane");
    if (n_mainline == 0) throw InputError("lane model has no mainline lane");
    if (!(merge_start_s_ >= 0.0) || !(merge_start_s_ < on_ramp().left_border.length())) {
        throw InputError("merge_start_s must lie on the on-ramp left border");
    }
    if (!(merge_ref_length_ > 0.0) || !std::isfinite(merge_ref_length_)) {
        throw InputError("merge_ref_length must be positive");
    }
}

int LaneModel::find(const std::string& id) const {
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
        if (lanes_[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

int LaneModel::locate(Vec2 p) const {
    int best = -1;
    double best_offset = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
        const Lane& lane = lanes_[i];
        const FrenetPosition l = lane.left_border.project(p);
        if (l.extrapolated || l.d > kOnBorderTol) continue;
        const FrenetPosition r = lane.right_border.project(p);
        if (r.extrapolated || r.d < -kOnBorderTol) continue;
        const double offset = std::abs(lane.centerline.project(p).d);
        if (offset < best_offset) {
            best_offset = offset;
            best = static_cast<int>(i);
        }
    }
    return best;
}

LaneModel::LateralInfo LaneModel::lateral(int lane_index, Vec2 p) const {
    const Lane& l = lane(lane_index);
    LateralInfo info;
    info.offset = l.centerline.project(p).d;
    info.to_left = l.left_border.project(p).d;
    info.to_right = l.right_border.project(p).d;
    info.width = info.to_right - info.to_left;
    return info;
}

int LaneModel::neighbor(int lane_index, bool left) const {
    const Lane& l = lane(lane_index);
    const Polyline& border = left ? l.left_border : l.right_border;
    const Vec2 probe = border.point_at(0.5 * border.length());
    constexpr double kSharedTol = 0.1;
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
        if (static_cast<int>(i) == lane_index) continue;
        const Polyline& other = left ? lanes_[i].right_border : lanes_[i].left_border;
        const FrenetPosition f = other.project(probe);
        if (!f.extrapolated && std::abs(f.d) < kSharedTol) return static_cast<int>(i);
    }
    return -1;
}

double normalized_maneuver_position(Vec2 p, const LaneModel& lanes) {
    const double s = lanes.on_ramp().left_border.project(p).s;
    return (s - lanes.merge_start_s()) / lanes.merge_ref_length();
}

std::optional<SegmentHit> segment_intersection(Vec2 a1, Vec2 a2, Vec2 b1, Vec2 b2) {
    constexpr double kEps = 1e-12;
    const Vec2 r = a2 - a1;
    const Vec2 q = b2 - b1;
    const Vec2 w = b1 - a1;
    const double rr = dot(r, r);
    const double qq = dot(q, q);
    const double denom = cross(r, q);
    const double scale = std::sqrt(rr * qq);

    if (std::abs(denom) > kEps * scale) {
        const double u = cross(w, q) / denom;
        const double v = cross(w, r) / denom;
        if (u < -kEps || u > 1.0 + kEps || v < -kEps || v > 1.0 + kEps) return std::nullopt;
        SegmentHit hit;
        hit.u = std::clamp(u, 0.0, 1.0);
        hit.v = std::clamp(v, 0.0, 1.0);
        // Averaging both parameterisations keeps the result symmetric in the
        // argument order.
        hit.point = 0.5 * ((a1 + hit.u * r) + (b1 + hit.v * q));
        return hit;
    }

    // Parallel or degenerate (zero-length) segments.
    const double len_ref = std::max({std::sqrt(rr), std::sqrt(qq), 1.0});
    if (rr > 0.0 && std::abs(cross(r, w)) > kEps * len_ref * std::sqrt(rr)) return std::nullopt;
    if (rr == 0.0 && qq > 0.0 && std::abs(cross(q, a1 - b1)) > kEps * len_ref * std::sqrt(qq)) return std::nullopt;

    // Collinear: sort the four endpoints along the common direction.
    const Vec2 dir = rr >= qq ? r : q;
    if (dot(dir, dir) == 0.0) {
        if (a1 == b1) return SegmentHit{a1, 0.0, 0.0, true};
        return std::nullopt;
    }
    auto param = [&](Vec2 p) { return dot(p - a1, dir); };
    Vec2 a_lo = a1, a_hi = a2;
    if (param(a_lo) > param(a_hi)) std::swap(a_lo, a_hi);
    Vec2 b_lo = b1, b_hi = b2;
    if (param(b_lo) > param(b_hi)) std::swap(b_lo, b_hi);
    const Vec2 lo = param(a_lo) >= param(b_lo) ? a_lo : b_lo;
    const Vec2 hi = param(a_hi) <= param(b_hi) ? a_hi : b_hi;
    if (param(lo) > param(hi) + kEps * len_ref) return std::nullopt;

    SegmentHit hit;
    hit.degenerate = true;
    hit.point = 0.5 * (lo + hi);
    hit.u = rr > 0.0 ? std::clamp(dot(hit.point - a1, r) / rr, 0.0, 1.0) : 0.0;
    hit.v = qq > 0.0 ? std::clamp(dot(hit.point - b1, q) / qq, 0.0, 1.0) : 0.0;
    return hit;
}

const char* to_string(LaneKind kind) { return kind == LaneKind::OnRamp ? "on-ramp" : "mainline"; }

LaneKind lane_kind_from_string(const std::string& s) {
    if (s == "on-ramp") return LaneKind::OnRamp;
    if (s == "mainline") return LaneKind::Mainline;
    throw InputError("unknown lane kind '" + s + "'");
}

}  // namespace onramp
