#include "onramp/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "onramp/errors.hpp"

namespace onramp {

using nlohmann::json;

namespace {

std::vector<Primitive> to_primitives(std::initializer_list<int> xs) {
    std::vector<Primitive> out;
    for (int x : xs) out.push_back(static_cast<Primitive>(x));
    return out;
}

}  // namespace

std::vector<Pattern> default_patterns() {
    return {
        {"merge", to_primitives({0, 1, 2, 3}), true},
        {"abort", to_primitives({0, 1, 2, 1, 0}), false},
        {"overshoot-merge", to_primitives({1, 2, 3}), true},
    };
}

std::vector<Pattern> parse_patterns(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("patterns: ") + e.what());
    }
    if (!root.is_array() || root.empty()) throw InputError("patterns: expected a non-empty array");
    std::vector<Pattern> out;
    for (const json& p : root) {
        if (!p.is_object() || !p.contains("name") || !p.contains("sequence") || !p["sequence"].is_array()) {
            throw InputError("patterns: each entry needs name and sequence");
        }
        Pattern pat;
        pat.name = p["name"].get<std::string>();
        pat.merge_family = p.value("merge_family", false);
        for (const json& v : p["sequence"]) {
            if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() >= kNumPrimitives) {
                throw InputError("patterns: '" + pat.name + "' has a value outside 0..3");
            }
            pat.sequence.push_back(static_cast<Primitive>(v.get<int>()));
        }
        if (pat.sequence.empty()) throw InputError("patterns: '" + pat.name + "' is empty");
        out.push_back(std::move(pat));
    }
    return out;
}

std::vector<Pattern> load_patterns(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open pattern file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_patterns(buf.str());
}

std::string patterns_to_json(std::span<const Pattern> patterns) {
    json root = json::array();
    for (const Pattern& p : patterns) {
        json seq = json::array();
        for (Primitive x : p.sequence) seq.push_back(static_cast<int>(x));
        root.push_back({{"name", p.name}, {"sequence", seq}, {"merge_family", p.merge_family}});
    }
    return root.dump(2) + "\n";
}

std::vector<CandidateSequence> partition(const PrimitiveSeries& prims, int xi, std::span<const int> reference_lane) {
    const auto& labels = prims.labels;
    const std::size_t n = labels.size();
    const bool anchored = reference_lane.size() == n;
    auto same_anchor = [&](std::size_t a, std::size_t b) { return !anchored || reference_lane[a] == reference_lane[b]; };
    auto in_core = [&](std::size_t i) { return static_cast<int>(labels[i]) >= xi; };

    std::vector<CandidateSequence> out;
    std::size_t i = 0;
    while (i < n) {
        if (!in_core(i)) {
            ++i;
            continue;
        }
        CandidateSequence c;
        c.object_id = prims.object_id;
        c.first = i;
        while (i + 1 < n && in_core(i + 1) && same_anchor(i, i + 1)) ++i;
        c.last = i;

        std::size_t lo = c.first;
        while (lo > 0 && same_anchor(lo - 1, lo)) {
            --lo;
            if (labels[lo] == Primitive::Idle) break;
        }
        std::size_t hi = c.last;
        while (hi + 1 < n && same_anchor(hi, hi + 1)) {
            ++hi;
            if (labels[hi] == Primitive::Idle) break;
        }
        c.context_first = lo;
        c.context_last = hi;
        c.primitives.assign(labels.begin() + static_cast<std::ptrdiff_t>(c.first),
                            labels.begin() + static_cast<std::ptrdiff_t>(c.last) + 1);
        c.context.assign(labels.begin() + static_cast<std::ptrdiff_t>(lo),
                         labels.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        out.push_back(std::move(c));
        ++i;
    }
    return out;
}

double dtw_distance(std::span<const Primitive> a, std::span<const Primitive> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("dtw_distance: empty series");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, kInf);
    std::vector<double> cur(m + 1, kInf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = kInf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double cost = std::abs(static_cast<int>(a[i - 1]) - static_cast<int>(b[j - 1]));
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::vector<Primitive> run_length_skeleton(std::span<const Primitive> labels) {
    std::vector<Primitive> out;
    for (Primitive p : labels) {
        if (out.empty() || out.back() != p) out.push_back(p);
    }
    return out;
}

double similarity(std::span<const Primitive> a, std::span<const Primitive> b) {
    return 1.0 / (1.0 + dtw_distance(run_length_skeleton(a), run_length_skeleton(b)));
}

MatchResult classify(const CandidateSequence& cand, std::span<const Pattern> patterns) {
    if (patterns.empty()) throw std::invalid_argument("classify: empty pattern library");
    MatchResult result;
    result.candidate = cand;
    result.similarity = -1.0;
    const auto skeleton = run_length_skeleton(cand.context);
    for (const Pattern& p : patterns) {
        const double sim = 1.0 / (1.0 + dtw_distance(skeleton, run_length_skeleton(p.sequence)));
        result.all_scores[p.name] = sim;
        if (sim > result.similarity) {
            result.similarity = sim;
            result.best_pattern = p.name;
            result.merge_family = p.merge_family;
        }
    }
    return result;
}

namespace {

double median_period(const Trajectory& traj) {
    std::vector<double> dts;
    for (std::size_t i = 1; i < traj.states.size(); ++i) dts.push_back(traj.states[i].t - traj.states[i - 1].t);
    if (dts.empty()) return 0.0;
    std::nth_element(dts.begin(), dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2), dts.end());
    return dts[dts.size() / 2];
}

}  // namespace

std::vector<ScenarioRecord> extract_scenarios(const Trajectory& traj, const LaneModel& lanes, const HmmParams& params,
                                              std::span<const Pattern> patterns, const ExtractionConfig& cfg) {
    std::vector<ScenarioRecord> records;
    if (traj.states.size() < 2) return records;

    const FeatureSeries features = reference_lane_tracking(traj, lanes, cfg.tracking);
    const PrimitiveSeries prims = viterbi(features, params);
    auto candidates = partition(prims, cfg.xi, features.reference_lane);

    // Drop single-frame flicker.
    const double period = median_period(traj);
    std::erase_if(candidates, [&](const CandidateSequence& c) {
        return static_cast<double>(c.last - c.first + 1) * period < cfg.min_candidate_duration - 1e-9;
    });

    // Cores separated only by Approach frames share one context; they are
    // one maneuver.
    std::vector<CandidateSequence> merged;
    for (auto& c : candidates) {
        if (!merged.empty() && merged.back().context_first == c.context_first &&
            merged.back().context_last == c.context_last) {
            CandidateSequence& m = merged.back();
            m.last = c.last;
            m.primitives.assign(prims.labels.begin() + static_cast<std::ptrdiff_t>(m.first),
                                prims.labels.begin() + static_cast<std::ptrdiff_t>(m.last) + 1);
            continue;
        }
        merged.push_back(std::move(c));
    }

    const auto& states = traj.states;
    const auto& ref = features.reference_lane;
    for (const CandidateSequence& c : merged) {
        const int source = ref[c.first];
        if (source != lanes.on_ramp_index()) continue;

        const MatchResult match = classify(c, patterns);

        std::size_t start = c.first;
        for (std::size_t k = c.context_first; k <= c.first; ++k) {
            if (prims.labels[k] == Primitive::Approach) {
                start = k;
                break;
            }
        }
        if (start == c.first) {
            for (std::size_t k = c.context_first; k < c.first; ++k) {
                if (prims.labels[k] != Primitive::Idle) {
                    start = k;
                    break;
                }
            }
        }
        std::size_t cross_entry = c.first;
        for (std::size_t k = c.first; k <= c.last; ++k) {
            if (prims.labels[k] == Primitive::Cross) {
                cross_entry = k;
                break;
            }
        }
        std::size_t end = c.context_last;
        bool reanchored = false;
        if (end + 1 < states.size() && ref[end + 1] != ref[end]) {
            ++end;
            reanchored = true;
        }

        // Direction from the signed offset at the deepest core frame.
        std::size_t deepest = c.first;
        for (std::size_t k = c.first; k <= c.last; ++k) {
            if (features.observations[k].d_c > features.observations[deepest].d_c) deepest = k;
        }
        const bool left = signed_offset(states[deepest], lanes, source) >= 0.0;
        int target = reanchored ? ref[end] : lanes.neighbor(source, left);

        ScenarioRecord rec;
        rec.object_id = traj.object_id;
        rec.segment = traj.segment;
        rec.pattern_class = match.best_pattern;
        rec.merge_family = match.merge_family;
        rec.similarity = match.similarity;
        rec.frame_start = states[c.context_first].frame;
        rec.frame_end = states[c.context_last].frame;
        rec.core_frame_start = states[c.first].frame;
        rec.core_frame_end = states[c.last].frame;
        rec.t_start = states[c.context_first].t;
        rec.t_end = states[c.context_last].t;
        rec.maneuver_start_frame = states[start].frame;
        rec.maneuver_end_frame = states[end].frame;
        rec.cross_entry_frame = states[cross_entry].frame;
        rec.cross_entry_t = states[cross_entry].t;
        rec.maneuver_start_pos = normalized_maneuver_position(states[start].position(), lanes);
        rec.maneuver_end_pos = normalized_maneuver_position(states[end].position(), lanes);
        rec.source_lane = lanes.lane(source).id;
        rec.target_lane = target >= 0 ? lanes.lane(target).id : std::string();
        rec.reanchored = reanchored;
        rec.direction = left ? "left" : "right";
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace onramp
