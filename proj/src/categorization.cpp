#include "onramp/categorization.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "onramp/errors.hpp"

namespace onramp {

using nlohmann::ordered_json;

const char* to_string(Category c) {
    switch (c) {
        case Category::Free: return "free";
        case Category::InFront: return "in_front";
        case Category::Behind: return "behind";
        case Category::Into: return "into";
        case Category::Ambiguous: return "ambiguous";
    }
    return "ambiguous";
}

Category category_from_string(const std::string& s) {
    for (Category c : {Category::Free, Category::InFront, Category::Behind, Category::Into, Category::Ambiguous}) {
        if (s == to_string(c)) return c;
    }
    throw InputError("unknown category '" + s + "'");
}

Category categorize(std::span<const double> pets) {
    if (pets.empty()) return Category::Free;
    bool any_pos = false;
    bool any_neg = false;
    double nearest = pets.front();
    for (double p : pets) {
        if (p == 0.0) return Category::Ambiguous;
        any_pos = any_pos || p > 0.0;
        any_neg = any_neg || p < 0.0;
        if (std::abs(p) < std::abs(nearest)) nearest = p;
    }
    if (pets.size() >= 2 && any_pos && any_neg) return Category::Into;
    return nearest > 0.0 ? Category::Behind : Category::InFront;
}

namespace {

std::vector<double> valid_pets(std::span<const PetResult> challengers) {
    std::vector<double> pets;
    for (const PetResult& r : challengers) {
        if (!r.degenerate && r.pet) pets.push_back(*r.pet);
    }
    return pets;
}

}  // namespace

Category categorize(std::span<const PetResult> challengers) { return categorize(valid_pets(challengers)); }

double accepted_gap(std::span<const double> pets) {
    if (categorize(pets) != Category::Into) throw std::invalid_argument("accepted_gap is only defined for into scenarios");
    double lead = -INFINITY;  // negative PET closest to zero
    double rear = INFINITY;   // positive PET closest to zero
    for (double p : pets) {
        if (p < 0.0) lead = std::max(lead, p);
        if (p > 0.0) rear = std::min(rear, p);
    }
    return std::abs(lead) + rear;
}

double accepted_gap(std::span<const PetResult> challengers) { return accepted_gap(valid_pets(challengers)); }

bool flag_critical(const ScenarioRecord& rec, double threshold_s) {
    for (const PetResult& r : rec.challengers) {
        if (!r.degenerate && r.pet && std::abs(*r.pet) < threshold_s) return true;
    }
    return false;
}

void finalize_record(ScenarioRecord& rec, double critical_threshold_s) {
    rec.category = categorize(rec.challengers);
    rec.accepted_gap.reset();
    if (rec.category == Category::Into) rec.accepted_gap = accepted_gap(rec.challengers);
    rec.critical = flag_critical(rec, critical_threshold_s);
}

std::string record_to_json(const ScenarioRecord& r) {
    ordered_json j;
    j["object_id"] = r.object_id;
    j["segment"] = r.segment;
    j["pattern_class"] = r.pattern_class;
    j["merge_family"] = r.merge_family;
    j["similarity"] = r.similarity;
    j["frame_start"] = r.frame_start;
    j["frame_end"] = r.frame_end;
    j["core_frame_start"] = r.core_frame_start;
    j["core_frame_end"] = r.core_frame_end;
    j["t_start"] = r.t_start;
    j["t_end"] = r.t_end;
    j["maneuver_start_frame"] = r.maneuver_start_frame;
    j["maneuver_end_frame"] = r.maneuver_end_frame;
    j["cross_entry_frame"] = r.cross_entry_frame;
    j["cross_entry_t"] = r.cross_entry_t;
    j["maneuver_start_pos"] = r.maneuver_start_pos;
    j["maneuver_end_pos"] = r.maneuver_end_pos;
    j["source_lane"] = r.source_lane;
    j["target_lane"] = r.target_lane;
    j["reanchored"] = r.reanchored;
    j["direction"] = r.direction;
    j["challengers"] = ordered_json::array();
    for (const PetResult& c : r.challengers) {
        ordered_json cj;
        cj["challenger_id"] = c.challenger_id;
        cj["pet_s"] = c.pet ? ordered_json(*c.pet) : ordered_json(nullptr);
        cj["n_intersections"] = c.points.size();
        cj["degenerate"] = c.degenerate;
        cj["collision_warning"] = c.collision_warning;
        j["challengers"].push_back(std::move(cj));
    }
    j["category"] = to_string(r.category);
    j["critical"] = r.critical;
    j["accepted_gap_s"] = r.accepted_gap ? ordered_json(*r.accepted_gap) : ordered_json(nullptr);
    return j.dump();
}

ScenarioRecord record_from_json(const std::string& line) {
    const ordered_json j = ordered_json::parse(line);
    ScenarioRecord r;
    r.object_id = j.at("object_id").get<std::int64_t>();
    r.segment = j.at("segment").get<int>();
    r.pattern_class = j.at("pattern_class").get<std::string>();
    r.merge_family = j.at("merge_family").get<bool>();
    r.similarity = j.at("similarity").get<double>();
    r.frame_start = j.at("frame_start").get<std::int64_t>();
    r.frame_end = j.at("frame_end").get<std::int64_t>();
    r.core_frame_start = j.at("core_frame_start").get<std::int64_t>();
    r.core_frame_end = j.at("core_frame_end").get<std::int64_t>();
    r.t_start = j.at("t_start").get<double>();
    r.t_end = j.at("t_end").get<double>();
    r.maneuver_start_frame = j.at("maneuver_start_frame").get<std::int64_t>();
    r.maneuver_end_frame = j.at("maneuver_end_frame").get<std::int64_t>();
    r.cross_entry_frame = j.at("cross_entry_frame").get<std::int64_t>();
    r.cross_entry_t = j.at("cross_entry_t").get<double>();
    r.maneuver_start_pos = j.at("maneuver_start_pos").get<double>();
    r.maneuver_end_pos = j.at("maneuver_end_pos").get<double>();
    r.source_lane = j.at("source_lane").get<std::string>();
    r.target_lane = j.at("target_lane").get<std::string>();
    r.reanchored = j.at("reanchored").get<bool>();
    r.direction = j.at("direction").get<std::string>();
    for (const auto& cj : j.at("challengers")) {
        PetResult c;
        c.challenger_id = cj.at("challenger_id").get<std::int64_t>();
        if (!cj.at("pet_s").is_null()) c.pet = cj.at("pet_s").get<double>();
        c.degenerate = cj.at("degenerate").get<bool>();
        c.collision_warning = cj.at("collision_warning").get<bool>();
        // Only the count of conflict points is serialized.
        c.points.resize(cj.at("n_intersections").get<std::size_t>());
        r.challengers.push_back(std::move(c));
    }
    r.category = category_from_string(j.at("category").get<std::string>());
    r.critical = j.at("critical").get<bool>();
    if (!j.at("accepted_gap_s").is_null()) r.accepted_gap = j.at("accepted_gap_s").get<double>();
    return r;
}

void write_records_jsonl(std::ostream& out, std::span<const ScenarioRecord> records) {
    for (const ScenarioRecord& r : records) out << record_to_json(r) << '\n';
}

std::vector<ScenarioRecord> read_records_jsonl(std::istream& in, const std::string& source) {
    std::vector<ScenarioRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(line));
        } catch (const std::exception& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    return out;
}

}  // namespace onramp
