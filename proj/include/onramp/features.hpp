#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "onramp/geometry.hpp"
#include "onramp/ingest.hpp"

namespace onramp {

/// HMM observation: normalized distance to the reference lane center and
/// the marking-crossing flag.
struct Observation {
    double d_c = 0.0;
    double kappa = 0.0;
};

/// Distances from the vehicle center to the next marking on either side
/// of its current lane, and the vehicle width.
struct RawFeatures {
    double d_l = 0.0;
    double d_r = 0.0;
    double w = 0.0;
};

/// Empty when the vehicle center is outside every lane.
std::optional<RawFeatures> raw_features(const VehicleState& state, const LaneModel& lanes);

/// Observation of `state` against `ref_lane`. d_c is the absolute
/// centerline offset over the local lane width; kappa is 1 when the
/// footprint (center +- width/2) is not contained in the reference lane,
/// i.e. it overlaps or lies beyond one of its markings. While the center
/// stays in the reference lane this is min(d_l, d_r) < w/2.
Observation transform(const VehicleState& state, const LaneModel& lanes, int ref_lane);

/// Signed centerline offset of `state` from `ref_lane`, in lane widths.
/// Positive to the left.
double signed_offset(const VehicleState& state, const LaneModel& lanes, int ref_lane);

struct ReferenceTracking {
    double settle_band = 0.25;  ///< lane widths from the candidate lane's center
    double settle_time = 0.5;   ///< seconds inside the band before re-anchoring
};

struct FeatureSeries {
    std::int64_t object_id = 0;
    std::vector<Observation> observations;
    std::vector<int> reference_lane;
};

/// Observation series with a hysteresis-tracked reference lane. The
/// reference starts at the first associated lane and moves to another lane
/// only after the center has stayed within `settle_band` lane widths of
/// that lane's center for `settle_time` seconds.
FeatureSeries reference_lane_tracking(const Trajectory& traj, const LaneModel& lanes,
                                      const ReferenceTracking& cfg = {});

/// Debug dump: `object_id,frame,d_l,d_r,w,d_c,kappa,ref_lane`.
void write_feature_csv(std::ostream& out, const Trajectory& traj, const FeatureSeries& features,
                       const LaneModel& lanes, bool header = true);

}  // namespace onramp
