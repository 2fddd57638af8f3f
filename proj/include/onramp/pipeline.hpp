#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "onramp/extraction.hpp"
#include "onramp/hmm.hpp"
#include "onramp/ingest.hpp"
#include "onramp/scenario.hpp"
#include "onramp/synth.hpp"

namespace onramp {

struct PipelineConfig {
    ExtractionConfig extraction;
    double vicinity_m = 100.0;
    double critical_s = 1.0;
    unsigned workers = 1;
    /// Drop egos whose path is not longer than half the on-ramp (clipped
    /// tracks). Challengers are always drawn from the full set.
    bool filter_clipped = true;
};

/// Extraction, challenger assessment and categorization for every
/// trajectory. Trajectories are processed by `workers` threads; the result
/// is ordered by (object_id, segment, frame_start) and does not depend on
/// the worker count.
std::vector<ScenarioRecord> run_pipeline(std::span<const Trajectory> trajectories, const LaneModel& lanes,
                                         const HmmParams& params, std::span<const Pattern> patterns,
                                         const PipelineConfig& cfg = {});

/// Adds challengers, PETs, category, accepted gap and critical flag to
/// records produced by extract_scenarios for `ego`.
void assess_records(std::vector<ScenarioRecord>& records, const Trajectory& ego,
                    std::span<const Trajectory> all_trajectories, const LaneModel& lanes, const PipelineConfig& cfg);

/// Counts per pattern class and category.
std::string summary_to_json(std::span<const ScenarioRecord> records, std::size_t n_trajectories);

struct Miss {
    std::int64_t object_id = 0;
    std::optional<double> start_pos;
    std::optional<double> end_pos;
    bool late = false;
};

struct FalsePositive {
    std::int64_t object_id = 0;
    std::string pattern_class;
};

struct Evaluation {
    std::size_t ground_truth_merges = 0;
    std::size_t predicted_merges = 0;  ///< objects with at least one merge-family record
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    std::optional<double> accuracy;   ///< TP / ground-truth merges
    std::optional<double> precision;  ///< absent without predictions
    std::optional<double> recall;
    std::vector<Miss> misses;
    std::vector<FalsePositive> false_positive_list;
};

/// Object-level comparison of merge-family records with ground-truth merge
/// labels. Throws InputError when a label names an unknown object or a
/// trajectory has no label.
Evaluation evaluate(std::span<const ScenarioRecord> records, std::span<const Trajectory> trajectories,
                    std::span<const GroundTruth> labels);

/// Without labels: ground-truth merges are the trajectories associated
/// with the on-ramp by the road-association heuristic.
Evaluation evaluate(std::span<const ScenarioRecord> records, std::span<const Trajectory> trajectories);

std::string evaluation_to_json(const Evaluation& ev);

/// "extracted 137 of 144 merging scenarios (accuracy 95.14 %)"
std::string format_summary(const Evaluation& ev);

}  // namespace onramp
