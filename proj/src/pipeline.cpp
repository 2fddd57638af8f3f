#include "onramp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "onramp/assessment.hpp"
#include "onramp/categorization.hpp"
#include "onramp/errors.hpp"

namespace onramp {

using nlohmann::ordered_json;

void assess_records(std::vector<ScenarioRecord>& records, const Trajectory& ego,
                    std::span<const Trajectory> all_trajectories, const LaneModel& lanes, const PipelineConfig& cfg) {
    for (ScenarioRecord& rec : records) {
        rec.challengers.clear();
        for (const Trajectory* ch : select_challengers(rec, ego, all_trajectories, lanes, cfg.vicinity_m)) {
            rec.challengers.push_back(pet(ego, *ch));
        }
        finalize_record(rec, cfg.critical_s);
    }
}

std::vector<ScenarioRecord> run_pipeline(std::span<const Trajectory> trajectories, const LaneModel& lanes,
                                         const HmmParams& params, std::span<const Pattern> patterns,
                                         const PipelineConfig& cfg) {
    std::vector<const Trajectory*> egos;
    if (cfg.filter_clipped) {
        const double min_length = 0.5 * lanes.on_ramp().left_border.length();
        for (const Trajectory& t : trajectories) {
            if (path_length(t) > min_length) egos.push_back(&t);
        }
    } else {
        for (const Trajectory& t : trajectories) egos.push_back(&t);
    }

    std::vector<std::vector<ScenarioRecord>> per_ego(egos.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < egos.size(); i = next++) {
            try {
                auto recs = extract_scenarios(*egos[i], lanes, params, patterns, cfg.extraction);
                assess_records(recs, *egos[i], trajectories, lanes, cfg);
                per_ego[i] = std::move(recs);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = egos.size();
            }
        }
    };

    const unsigned n_workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(egos.size())));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<ScenarioRecord> out;
    for (auto& recs : per_ego) {
        for (auto& r : recs) out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const ScenarioRecord& a, const ScenarioRecord& b) {
        return std::tie(a.object_id, a.segment, a.frame_start) < std::tie(b.object_id, b.segment, b.frame_start);
    });
    return out;
}

std::string summary_to_json(std::span<const ScenarioRecord> records, std::size_t n_trajectories) {
    std::map<std::string, std::size_t> by_class;
    std::map<std::string, std::size_t> by_category;
    for (Category c : {Category::Free, Category::InFront, Category::Behind, Category::Into, Category::Ambiguous}) {
        by_category[to_string(c)] = 0;
    }
    std::size_t merges = 0;
    std::size_t critical = 0;
    for (const ScenarioRecord& r : records) {
        ++by_class[r.pattern_class];
        if (r.merge_family) {
            ++merges;
            ++by_category[to_string(r.category)];
        }
        critical += r.critical ? 1 : 0;
    }
    ordered_json j;
    j["n_trajectories"] = n_trajectories;
    j["n_records"] = records.size();
    j["n_merge_family"] = merges;
    j["n_critical"] = critical;
    j["pattern_class_counts"] = by_class;
    j["merge_category_counts"] = by_category;
    return j.dump(2) + "\n";
}

namespace {

Evaluation compare(std::span<const ScenarioRecord> records, const std::set<std::int64_t>& truth,
                   const std::map<std::int64_t, const GroundTruth*>& labels) {
    Evaluation ev;
    std::map<std::int64_t, std::string> predicted;
    for (const ScenarioRecord& r : records) {
        if (r.merge_family) predicted.emplace(r.object_id, r.pattern_class);
    }
    ev.ground_truth_merges = truth.size();
    ev.predicted_merges = predicted.size();
    for (const auto& [id, cls] : predicted) {
        if (truth.count(id)) {
            ++ev.true_positives;
        } else {
            ++ev.false_positives;
            ev.false_positive_list.push_back({id, cls});
        }
    }
    for (std::int64_t id : truth) {
        if (predicted.count(id)) continue;
        ++ev.false_negatives;
        Miss m{id, std::nullopt, std::nullopt, false};
        if (const auto it = labels.find(id); it != labels.end()) {
            m.start_pos = it->second->start_pos;
            m.end_pos = it->second->end_pos;
            m.late = it->second->late;
        }
        ev.misses.push_back(m);
    }
    if (!truth.empty()) {
        ev.accuracy = static_cast<double>(ev.true_positives) / static_cast<double>(truth.size());
        ev.recall = ev.accuracy;
    }
    if (!predicted.empty()) {
        ev.precision = static_cast<double>(ev.true_positives) / static_cast<double>(predicted.size());
    }
    return ev;
}

}  // namespace

Evaluation evaluate(std::span<const ScenarioRecord> records, std::span<const Trajectory> trajectories,
                    std::span<const GroundTruth> labels) {
    std::map<std::int64_t, const GroundTruth*> by_id;
    for (const GroundTruth& g : labels) {
        if (!by_id.emplace(g.object_id, &g).second) {
            throw InputError("labels: duplicate object " + std::to_string(g.object_id));
        }
    }
    std::set<std::int64_t> ids;
    for (const Trajectory& t : trajectories) {
        ids.insert(t.object_id);
        if (!by_id.count(t.object_id)) throw InputError("labels: no label for object " + std::to_string(t.object_id));
    }
    std::set<std::int64_t> truth;
    for (const GroundTruth& g : labels) {
        if (!ids.count(g.object_id)) throw InputError("labels: unknown object " + std::to_string(g.object_id));
        if (g.label == TruthLabel::Merge) truth.insert(g.object_id);
    }
    return compare(records, truth, by_id);
}

Evaluation evaluate(std::span<const ScenarioRecord> records, std::span<const Trajectory> trajectories) {
    std::set<std::int64_t> truth;
    for (const Trajectory& t : trajectories) {
        if (t.source_road == RoadAssociation::OnRamp) truth.insert(t.object_id);
    }
    return compare(records, truth, {});
}

std::string evaluation_to_json(const Evaluation& ev) {
    auto opt = [](const std::optional<double>& o) { return o ? ordered_json(*o) : ordered_json(nullptr); };
    ordered_json j;
    j["summary"] = format_summary(ev);
    j["ground_truth_merges"] = ev.ground_truth_merges;
    j["predicted_merges"] = ev.predicted_merges;
    j["true_positives"] = ev.true_positives;
    j["false_positives"] = ev.false_positives;
    j["false_negatives"] = ev.false_negatives;
    j["accuracy"] = opt(ev.accuracy);
    j["precision"] = opt(ev.precision);
    j["recall"] = opt(ev.recall);
    j["misses"] = ordered_json::array();
    for (const Miss& m : ev.misses) {
        j["misses"].push_back(
            {{"object_id", m.object_id}, {"start_pos", opt(m.start_pos)}, {"end_pos", opt(m.end_pos)}, {"late", m.late}});
    }
    j["false_positive_objects"] = ordered_json::array();
    for (const FalsePositive& f : ev.false_positive_list) {
        j["false_positive_objects"].push_back({{"object_id", f.object_id}, {"pattern_class", f.pattern_class}});
    }
    return j.dump(2) + "\n";
}

std::string format_summary(const Evaluation& ev) {
    std::string s = "extracted " + std::to_string(ev.true_positives) + " of " + std::to_string(ev.ground_truth_merges) +
                    " merging scenarios";
    if (ev.accuracy) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, *ev.accuracy * 100.0, std::chars_format::fixed, 2);
        s += " (accuracy " + std::string(buf, res.ptr) + " %)";
    }
    return s;
}

}  // namespace onramp
