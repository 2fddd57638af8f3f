#include "onramp/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <istream>

#include "onramp/errors.hpp"

namespace onramp {

namespace {

constexpr std::array<const char*, 10> kColumns = {"object_id", "frame", "t", "x", "y", "heading",
                                                  "v", "width", "length", "class"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct Row {
    std::size_t line = 0;
    std::int64_t object_id = 0;
    ObjectClass object_class = ObjectClass::Car;
    VehicleState state;
};

double median(std::vector<double> v) {
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    }
    return m;
}

}  // namespace

const char* to_string(ObjectClass c) {
    switch (c) {
        case ObjectClass::Car: return "car";
        case ObjectClass::Truck: return "truck";
        case ObjectClass::Other: return "other";
    }
    return "other";
}

ObjectClass object_class_from_string(const std::string& s) {
    if (s == "car") return ObjectClass::Car;
    if (s == "truck") return ObjectClass::Truck;
    if (s == "other") return ObjectClass::Other;
    throw InputError("unknown object class '" + s + "'");
}

const char* to_string(RoadAssociation r) { return r == RoadAssociation::OnRamp ? "on-ramp" : "highway"; }

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void associate_lanes(Trajectory& traj, const LaneModel& lanes) {
    for (VehicleState& s : traj.states) s.lane = lanes.locate(s.position());
}

RoadAssociation associate_road(const Trajectory& traj, const LaneModel& lanes) {
    int first = kOffRoad;
    int last = kOffRoad;
    for (const VehicleState& s : traj.states) {
        if (s.lane == kOffRoad) continue;
        if (first == kOffRoad) first = s.lane;
        last = s.lane;
    }
    if (first == kOffRoad) return RoadAssociation::Highway;
    const bool starts_on_ramp = first == lanes.on_ramp_index();
    const bool ends_mainline = lanes.lane(last).kind == LaneKind::Mainline;
    return starts_on_ramp && ends_mainline ? RoadAssociation::OnRamp : RoadAssociation::Highway;
}

double path_length(const Trajectory& traj) {
    double len = 0.0;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        len += distance(traj.states[i - 1].position(), traj.states[i].position());
    }
    return len;
}

std::vector<Trajectory> filter_clipped(std::vector<Trajectory> trajs, const LaneModel& lanes) {
    const double threshold = 0.5 * lanes.on_ramp().left_border.length();
    std::erase_if(trajs, [&](const Trajectory& t) { return !(path_length(t) > threshold); });
    return trajs;
}

std::vector<Trajectory> parse_trajectories(std::istream& in, const LaneModel& lanes, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::array<int, kColumns.size()> col{};
    col.fill(-1);
    std::size_t n_fields = 0;

    // Header.
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        n_fields = fields.size();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            for (std::size_t c = 0; c < kColumns.size(); ++c) {
                if (fields[i] == kColumns[c]) col[c] = static_cast<int>(i);
            }
        }
        for (std::size_t c = 0; c < kColumns.size(); ++c) {
            if (col[c] < 0) throw ParseError(source, line_no, std::string("header lacks column '") + kColumns[c] + "'");
        }
        break;
    }
    if (n_fields == 0) return {};

    std::map<std::int64_t, std::vector<Row>> by_object;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != n_fields) {
            throw ParseError(source, line_no, "expected " + std::to_string(n_fields) + " fields, got " +
                                                  std::to_string(fields.size()));
        }
        auto field = [&](std::size_t c) { return fields[static_cast<std::size_t>(col[c])]; };
        Row row;
        row.line = line_no;
        auto num = [&](std::size_t c, double& out) {
            if (!parse_number(field(c), out) || !std::isfinite(out)) {
                throw ParseError(source, line_no, std::string("invalid number in column '") + kColumns[c] + "'");
            }
        };
        if (!parse_number(field(0), row.object_id)) throw ParseError(source, line_no, "invalid object_id");
        if (!parse_number(field(1), row.state.frame)) throw ParseError(source, line_no, "invalid frame");
        num(2, row.state.t);
        num(3, row.state.x);
        num(4, row.state.y);
        num(5, row.state.heading);
        if (!field(6).empty()) {
            double v = 0.0;
            num(6, v);
            row.state.v = v;
        }
        num(7, row.state.width);
        num(8, row.state.length);
        if (!(row.state.width > 0.0)) throw ParseError(source, line_no, "width must be > 0");
        if (!(row.state.length > 0.0)) throw ParseError(source, line_no, "length must be > 0");
        try {
            row.object_class = object_class_from_string(std::string(field(9)));
        } catch (const InputError& e) {
            throw ParseError(source, line_no, e.what());
        }
        by_object[row.object_id].push_back(std::move(row));
    }

    std::vector<Trajectory> out;
    for (auto& [id, rows] : by_object) {
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.state.t < b.state.t; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(rows[i].state.t > rows[i - 1].state.t)) {
                throw ParseError(source, rows[i].line, "duplicate timestamp for object " + std::to_string(id));
            }
        }
        std::vector<double> dts;
        for (std::size_t i = 1; i < rows.size(); ++i) dts.push_back(rows[i].state.t - rows[i - 1].state.t);
        const double max_gap = dts.empty() ? 0.0 : 3.0 * median(dts);

        int segment = 0;
        Trajectory current;
        auto flush = [&] {
            if (current.states.size() >= 2) {
                associate_lanes(current, lanes);
                current.source_road = associate_road(current, lanes);
                out.push_back(std::move(current));
                ++segment;
            }
            current = Trajectory{};
        };
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].state.t - rows[i - 1].state.t > max_gap) flush();
            if (current.states.empty()) {
                current.object_id = id;
                current.segment = segment;
                current.object_class = rows[i].object_class;
            }
            current.states.push_back(rows[i].state);
        }
        flush();
    }
    return out;
}

Dataset load_dataset(const std::string& trajectory_file, const std::string& lane_file) {
    LaneModel lanes = load_lane_model(lane_file);
    std::ifstream in(trajectory_file);
    if (!in) throw InputError("cannot open trajectory file '" + trajectory_file + "'");
    auto trajs = parse_trajectories(in, lanes, trajectory_file);
    return Dataset{std::move(trajs), std::move(lanes)};
}

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories) {
    out << "object_id,frame,t,x,y,heading,v,width,length,class\n";
    for (const Trajectory& traj : trajectories) {
        for (const VehicleState& s : traj.states) {
            out << traj.object_id << ',' << s.frame << ',' << format_double(s.t) << ',' << format_double(s.x) << ','
                << format_double(s.y) << ',' << format_double(s.heading) << ','
                << (s.v ? format_double(*s.v) : std::string()) << ',' << format_double(s.width) << ','
                << format_double(s.length) << ',' << to_string(traj.object_class) << '\n';
        }
    }
}

}  // namespace onramp
