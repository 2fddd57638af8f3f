#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "onramp/features.hpp"

namespace onramp {

/// Lateral driving primitives of a lane change, in HMM state order.
enum class Primitive : int { Idle = 0, Approach = 1, Cross = 2, Change = 3 };

inline constexpr int kNumPrimitives = 4;

const char* to_string(Primitive p);

/// One diagonal-covariance Gaussian over (d_c, kappa).
struct GaussianComponent {
    double weight = 1.0;
    std::array<double, 2> mean{};
    std::array<double, 2> std{};
};

/// Emission density of one state as a Gaussian mixture. The shipped
/// parameters use a single component per state.
struct StateEmission {
    std::vector<GaussianComponent> components;
};

struct HmmParams {
    std::array<std::array<double, kNumPrimitives>, kNumPrimitives> transition{};  ///< row = from
    std::array<double, kNumPrimitives> initial{};
    std::array<StateEmission, kNumPrimitives> emissions;

    /// Throws InputError when rows / initial do not sum to 1 within 1e-9,
    /// entries are negative, or any std / weight is not positive.
    void validate() const;
};

/// Standard deviation used for kappa, whose spread is not part of the
/// reference parameter table.
inline constexpr double kKappaStdFloor = 0.1;

/// Published lane-change primitive model: transition percentages divided
/// by 100 (rows renormalized), d_c Gaussians per state, kappa means
/// 0/0/1/1 with kKappaStdFloor, uniform initial distribution.
HmmParams default_params();

/// JSON `{A: 4x4, pi: [4], emissions: [{mean: [2], std: [2]} x4]}`.
/// An emission may instead carry `components: [{weight, mean, std}]`.
HmmParams parse_hmm_params(const std::string& json_text);
HmmParams load_hmm_params(const std::string& path);
std::string hmm_params_to_json(const HmmParams& params);

double emission_logpdf(Primitive state, const Observation& obs, const HmmParams& params);

struct PrimitiveSeries {
    std::int64_t object_id = 0;
    std::vector<Primitive> labels;
    double log_likelihood = 0.0;
};

/// Most likely primitive path, computed in log space. Zero-probability
/// transitions are never taken. Ties resolve to the lower state index
/// (for the final state first, then each back-pointer).
/// Throws InputError on an empty series or a non-finite observation.
PrimitiveSeries viterbi(std::span<const Observation> obs, const HmmParams& params);

inline PrimitiveSeries viterbi(const FeatureSeries& features, const HmmParams& params) {
    PrimitiveSeries out = viterbi(std::span<const Observation>(features.observations), params);
    out.object_id = features.object_id;
    return out;
}

/// Joint log-probability of a given path and the observations.
double path_log_probability(std::span<const Primitive> path, std::span<const Observation> obs,
                            const HmmParams& params);

}  // namespace onramp
