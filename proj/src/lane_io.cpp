#include <fstream>
#include <sstream>

#include <json.hpp>

#include "onramp/errors.hpp"
#include "onramp/geometry.hpp"

namespace onramp {

using nlohmann::json;

namespace {

Polyline polyline_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw InputError(where + ": expected an array of [x, y] pairs");
    std::vector<Vec2> pts;
    pts.reserve(j.size());
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw InputError(where + ": vertex must be [x, y]");
        }
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    try {
        return Polyline(std::move(pts));
    } catch (const std::invalid_argument& e) {
        throw InputError(where + ": " + e.what());
    }
}

json polyline_to_json(const Polyline& line) {
    json out = json::array();
    for (const Vec2& v : line.vertices()) out.push_back({v.x, v.y});
    return out;
}

}  // namespace

LaneModel parse_lane_model(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("lane geometry: ") + e.what());
    }
    if (!root.is_object() || !root.contains("lanes") || !root["lanes"].is_array()) {
        throw InputError("lane geometry: missing 'lanes' array");
    }
    for (const char* key : {"merge_start_s", "merge_ref_length"}) {
        if (!root.contains(key) || !root[key].is_number()) {
            throw InputError(std::string("lane geometry: missing numeric '") + key + "'");
        }
    }
    std::vector<Lane> lanes;
    for (std::size_t i = 0; i < root["lanes"].size(); ++i) {
        const json& l = root["lanes"][i];
        const std::string where = "lane geometry: lanes[" + std::to_string(i) + "]";
        if (!l.is_object() || !l.contains("id") || !l.contains("kind")) {
            throw InputError(where + ": needs id and kind");
        }
        for (const char* key : {"left_border", "right_border", "centerline"}) {
            if (!l.contains(key)) throw InputError(where + ": missing '" + key + "'");
        }
        std::string id = l["id"].is_string() ? l["id"].get<std::string>() : l["id"].dump();
        lanes.push_back(Lane{id, lane_kind_from_string(l["kind"].get<std::string>()),
                             polyline_from_json(l["left_border"], where + ".left_border"),
                             polyline_from_json(l["right_border"], where + ".right_border"),
                             polyline_from_json(l["centerline"], where + ".centerline")});
    }
    return LaneModel(std::move(lanes), root["merge_start_s"].get<double>(), root["merge_ref_length"].get<double>());
}

LaneModel load_lane_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open lane geometry file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_lane_model(buf.str());
}

std::string lane_model_to_json(const LaneModel& model) {
    json root;
    root["lanes"] = json::array();
    for (const Lane& l : model.lanes()) {
        root["lanes"].push_back({{"id", l.id},
                                 {"kind", to_string(l.kind)},
                                 {"left_border", polyline_to_json(l.left_border)},
                                 {"right_border", polyline_to_json(l.right_border)},
                                 {"centerline", polyline_to_json(l.centerline)}});
    }
    root["merge_start_s"] = model.merge_start_s();
    root["merge_ref_length"] = model.merge_ref_length();
    return root.dump(2) + "\n";
}

}  // namespace onramp
