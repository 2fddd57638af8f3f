#include "onramp/features.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace onramp {

std::optional<RawFeatures> raw_features(const VehicleState& state, const LaneModel& lanes) {
    const int lane = state.lane != kOffRoad ? state.lane : lanes.locate(state.position());
    if (lane == kOffRoad) return std::nullopt;
    const auto info = lanes.lateral(lane, state.position());
    return RawFeatures{std::max(0.0, -info.to_left), std::max(0.0, info.to_right), state.width};
}

double signed_offset(const VehicleState& state, const LaneModel& lanes, int ref_lane) {
    const auto info = lanes.lateral(ref_lane, state.position());
    return info.offset / info.width;
}

Observation transform(const VehicleState& state, const LaneModel& lanes, int ref_lane) {
    Observation obs;
    obs.d_c = std::abs(signed_offset(state, lanes, ref_lane));

    // Signed gaps to the reference lane's markings, negative once the
    // center is beyond them.
    const auto info = lanes.lateral(ref_lane, state.position());
    const double d_l = -info.to_left;
    const double d_r = info.to_right;
    obs.kappa = std::min(d_l, d_r) < 0.5 * state.width ? 1.0 : 0.0;
    return obs;
}

namespace {

int nearest_lane(const VehicleState& state, const LaneModel& lanes) {
    int best = 0;
    double best_offset = std::numeric_limits<double>::infinity();
    for (int i = 0; i < lanes.size(); ++i) {
        const double off = std::abs(lanes.lateral(i, state.position()).offset);
        if (off < best_offset) {
            best_offset = off;
            best = i;
        }
    }
    return best;
}

}  // namespace

FeatureSeries reference_lane_tracking(const Trajectory& traj, const LaneModel& lanes, const ReferenceTracking& cfg) {
    FeatureSeries out;
    out.object_id = traj.object_id;
    out.observations.reserve(traj.states.size());
    out.reference_lane.reserve(traj.states.size());
    if (traj.states.empty()) return out;

    int ref = kOffRoad;
    for (const VehicleState& s : traj.states) {
        if (s.lane != kOffRoad) {
            ref = s.lane;
            break;
        }
    }
    if (ref == kOffRoad) ref = nearest_lane(traj.states.front(), lanes);

    int candidate = kOffRoad;
    double candidate_since = 0.0;
    constexpr double kTimeTol = 1e-9;
    for (const VehicleState& s : traj.states) {
        if (s.lane != kOffRoad && s.lane != ref) {
            const auto info = lanes.lateral(s.lane, s.position());
            if (std::abs(info.offset) <= cfg.settle_band * info.width) {
                if (candidate != s.lane) {
                    candidate = s.lane;
                    candidate_since = s.t;
                }
                if (s.t - candidate_since >= cfg.settle_time - kTimeTol) {
                    ref = candidate;
                    candidate = kOffRoad;
                }
            } else {
                candidate = kOffRoad;
            }
        } else {
            candidate = kOffRoad;
        }
        out.observations.push_back(transform(s, lanes, ref));
        out.reference_lane.push_back(ref);
    }
    return out;
}

void write_feature_csv(std::ostream& out, const Trajectory& traj, const FeatureSeries& features,
                       const LaneModel& lanes, bool header) {
    if (header) out << "object_id,frame,d_l,d_r,w,d_c,kappa,ref_lane\n";
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const VehicleState& s = traj.states[i];
        const auto raw = raw_features(s, lanes);
        out << traj.object_id << ',' << s.frame << ',';
        if (raw) {
            out << format_double(raw->d_l) << ',' << format_double(raw->d_r);
        } else {
            out << "off_road,off_road";
        }
        out << ',' << format_double(s.width) << ',' << format_double(features.observations[i].d_c) << ','
            << features.observations[i].kappa << ',' << lanes.lane(features.reference_lane[i]).id << '\n';
    }
}

}  // namespace onramp
