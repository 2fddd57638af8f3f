#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "onramp/features.hpp"
#include "onramp/hmm.hpp"
#include "onramp/ingest.hpp"
#include "onramp/scenario.hpp"

namespace onramp {

/// A maximal run of frames whose primitive index is >= xi, plus its
/// surrounding context.
struct CandidateSequence {
    std::int64_t object_id = 0;
    std::size_t first = 0;  ///< core frame range, inclusive (indices into the series)
    std::size_t last = 0;
    std::size_t context_first = 0;  ///< context range, inclusive
    std::size_t context_last = 0;
    std::vector<Primitive> primitives;  ///< core labels
    std::vector<Primitive> context;     ///< context labels
};

struct Pattern {
    std::string name;
    std::vector<Primitive> sequence;
    bool merge_family = false;
};

struct MatchResult {
    CandidateSequence candidate;
    std::string best_pattern;
    bool merge_family = false;
    double similarity = 0.0;
    std::map<std::string, double> all_scores;
};

/// merge [0,1,2,3], abort [0,1,2,1,0], overshoot-merge [1,2,3].
std::vector<Pattern> default_patterns();
std::vector<Pattern> parse_patterns(const std::string& json_text);
std::vector<Pattern> load_patterns(const std::string& path);
std::string patterns_to_json(std::span<const Pattern> patterns);

/// Maximal runs with every label >= xi. Context extends each run backward
/// and forward up to and including the nearest Idle frame (or the series
/// boundary). When `reference_lane` is given, neither runs nor contexts
/// extend across a change of reference lane.
std::vector<CandidateSequence> partition(const PrimitiveSeries& prims, int xi = 2,
                                         std::span<const int> reference_lane = {});

/// Classic DTW with cost |a_i - b_j| and steps (1,0), (0,1), (1,1).
double dtw_distance(std::span<const Primitive> a, std::span<const Primitive> b);

/// Collapses runs of equal labels: [0,0,1,1,2] -> [0,1,2].
std::vector<Primitive> run_length_skeleton(std::span<const Primitive> labels);

/// 1 / (1 + DTW) between the skeletons of `a` and `b`.
double similarity(std::span<const Primitive> a, std::span<const Primitive> b);

/// Best-matching pattern for the candidate's context skeleton. Ties keep
/// the earlier pattern. Throws std::invalid_argument on an empty library.
MatchResult classify(const CandidateSequence& cand, std::span<const Pattern> patterns);

struct ExtractionConfig {
    int xi = 2;
    double min_candidate_duration = 0.2;  ///< s
    ReferenceTracking tracking;
};

/// Features -> Viterbi -> partition -> classify for one trajectory. Emits
/// one record per candidate whose source (reference) lane is the on-ramp.
/// Challenger fields are left empty; see assessment.
std::vector<ScenarioRecord> extract_scenarios(const Trajectory& traj, const LaneModel& lanes,
                                              const HmmParams& params, std::span<const Pattern> patterns,
                                              const ExtractionConfig& cfg = {});

}  // namespace onramp
