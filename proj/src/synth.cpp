#include "onramp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "onramp/errors.hpp"

namespace onramp {

using nlohmann::ordered_json;

void SynthConfig::validate() const {
    if (n_mainline < 0 || n_merging < 0 || n_aborting < 0 || n_late_merges < 0) {
        throw InputError("synth: vehicle counts must be >= 0");
    }
    if (!(noise_std >= 0.0)) throw InputError("synth: noise std must be >= 0");
    if (!(rate_hz > 0.0)) throw InputError("synth: sampling rate must be > 0");
    if (!(lane_width > 0.0) || !(ramp_length > merge_start_s) || !(mainline_end > ramp_length) ||
        !(mainline_begin < 0.0)) {
        throw InputError("synth: inconsistent road geometry");
    }
}

const char* to_string(TruthLabel l) {
    switch (l) {
        case TruthLabel::None: return "none";
        case TruthLabel::Merge: return "merge";
        case TruthLabel::Abort: return "abort";
    }
    return "none";
}

namespace {

TruthLabel truth_label_from_string(const std::string& s) {
    if (s == "none") return TruthLabel::None;
    if (s == "merge") return TruthLabel::Merge;
    if (s == "abort") return TruthLabel::Abort;
    throw InputError("labels: unknown label '" + s + "'");
}

Polyline straight(double x0, double x1, double y, double spacing) {
    std::vector<Vec2> pts;
    const int n = std::max(1, static_cast<int>(std::ceil((x1 - x0) / spacing)));
    for (int i = 0; i <= n; ++i) pts.push_back({x0 + (x1 - x0) * i / n, y});
    return Polyline(std::move(pts));
}

/// Lateral position as a function of the longitudinal coordinate x.
struct Profile {
    enum class Kind { Keep, Sigmoid, Bump } kind = Kind::Keep;
    double y0 = 0.0;
    double amp = 0.0;  // total shift (Sigmoid) or peak offset (Bump)
    double x_mid = 0.0;
    double x_a = 0.0;
    double x_b = 0.0;
    double lambda = 1.0;

    double bump_norm() const { return std::tanh((x_b - x_a) / (2.0 * lambda)); }

    double y(double x) const {
        switch (kind) {
            case Kind::Keep: return y0;
            case Kind::Sigmoid: return y0 + amp * 0.5 * (1.0 + std::tanh((x - x_mid) / lambda));
            case Kind::Bump:
                return y0 + amp / bump_norm() * 0.5 * (std::tanh((x - x_a) / lambda) - std::tanh((x - x_b) / lambda));
        }
        return y0;
    }

    double dydx(double x) const {
        switch (kind) {
            case Kind::Keep: return 0.0;
            case Kind::Sigmoid: {
                const double th = std::tanh((x - x_mid) / lambda);
                return amp * 0.5 * (1.0 - th * th) / lambda;
            }
            case Kind::Bump: {
                const double ta = std::tanh((x - x_a) / lambda);
                const double tb = std::tanh((x - x_b) / lambda);
                return amp / bump_norm() * 0.5 * ((1.0 - ta * ta) - (1.0 - tb * tb)) / lambda;
            }
        }
        return 0.0;
    }
};

struct VehicleSpec {
    std::int64_t id = 0;
    ObjectClass cls = ObjectClass::Car;
    double length = 4.5;
    double width = 1.8;
    double t_entry = 0.0;
    double x_entry = 0.0;
    double x_exit = 0.0;
    double v = 25.0;
    Profile profile;
    TruthLabel label = TruthLabel::None;
    bool late = false;
    bool on_main_1 = false;

    std::int64_t first_frame = 0;
    std::int64_t last_frame = 0;

    double x_at(double t) const { return x_entry + v * (t - t_entry); }
    double t_at_x(double x) const { return t_entry + (x - x_entry) / v; }

    /// Corner position at time t; `front` / `left` select the corner.
    Vec2 corner(double t, bool front, bool left) const {
        const double x = x_at(t);
        const double h = std::atan(profile.dydx(x));
        const Vec2 fwd{std::cos(h), std::sin(h)};
        const Vec2 lat{-fwd.y, fwd.x};
        return Vec2{x, profile.y(x)} + ((front ? 0.5 : -0.5) * length) * fwd + ((left ? 0.5 : -0.5) * width) * lat;
    }
};

double uniform(std::mt19937_64& rng, Range r) { return std::uniform_real_distribution<double>(r.lo, r.hi)(rng); }

void sample_frames(VehicleSpec& v, double rate) {
    v.first_frame = static_cast<std::int64_t>(std::ceil(v.t_entry * rate - 1e-9));
    const double t_exit = v.t_at_x(v.x_exit);
    v.last_frame = static_cast<std::int64_t>(std::floor(t_exit * rate + 1e-9));
}

// atanh of the sigmoid levels used to place merges: 0.2 / 0.75 of one lane
// (regular merge) and 0.1 / 0.875 of two lanes (late double-lane sweep).
double sigmoid_z(double fraction) { return std::atanh(2.0 * fraction - 1.0); }

Profile merge_profile(double y0, double amp, double x_on, double x_off, double f_on, double f_off) {
    Profile p;
    p.kind = Profile::Kind::Sigmoid;
    p.y0 = y0;
    p.amp = amp;
    const double z_on = sigmoid_z(f_on);
    const double z_off = sigmoid_z(f_off);
    p.lambda = (x_off - x_on) / (z_off - z_on);
    p.x_mid = x_on - z_on * p.lambda;
    return p;
}

/// Arrival-time differences (ego minus challenger) at the crossings of the
/// ego's left corner paths with a straight challenger's right corner paths.
/// With `within_track` only crossings inside the challenger's sampled
/// extent are kept.
std::vector<double> closed_form_dts(const VehicleSpec& ego, const VehicleSpec& ch, double rate, bool within_track) {
    std::vector<double> out;
    const double y_line = ch.profile.y0 - 0.5 * ch.width;
    const double t0 = static_cast<double>(ego.first_frame) / rate;
    const double t1 = static_cast<double>(ego.last_frame) / rate;
    const double ch_t0 = static_cast<double>(ch.first_frame) / rate;
    const double ch_t1 = static_cast<double>(ch.last_frame) / rate;
    const double step = 0.25 / rate;
    for (bool front : {true, false}) {
        auto below = [&](double t) { return ego.corner(t, front, true).y < y_line; };
        for (double t = t0; t + step <= t1 + 1e-12; t += step) {
            if (below(t) == below(t + step)) continue;
            double a = t;
            double b = t + step;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                if (below(a) == below(m)) {
                    a = m;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            const double x_star = ego.corner(root, front, true).x;
            for (bool ch_front : {true, false}) {
                const double t_ch = ch.t_at_x(x_star - (ch_front ? 0.5 : -0.5) * ch.length);
                if (within_track && (t_ch < ch_t0 || t_ch > ch_t1)) continue;
                out.push_back(root - t_ch);
            }
            break;
        }
    }
    return out;
}

std::optional<double> closed_form_pet(const VehicleSpec& ego, const VehicleSpec& ch, double rate) {
    std::optional<double> best;
    for (double dt : closed_form_dts(ego, ch, rate, true)) {
        if (!best || std::abs(dt) < std::abs(*best)) best = dt;
    }
    return best;
}

Trajectory sample(const VehicleSpec& v, const SynthConfig& cfg, std::mt19937_64& noise_rng, const LaneModel& lanes) {
    Trajectory traj;
    traj.object_id = v.id;
    traj.object_class = v.cls;
    std::normal_distribution<double> noise(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);
    for (std::int64_t k = v.first_frame; k <= v.last_frame; ++k) {
        const double t = static_cast<double>(k) / cfg.rate_hz;
        const double x = v.x_at(t);
        const double slope = v.profile.dydx(x);
        VehicleState s;
        s.frame = k;
        s.t = t;
        s.x = x;
        s.y = v.profile.y(x);
        if (cfg.noise_std > 0.0) {
            s.x += noise(noise_rng);
            s.y += noise(noise_rng);
        }
        s.heading = std::atan(slope);
        s.v = v.v * std::sqrt(1.0 + slope * slope);
        s.width = v.width;
        s.length = v.length;
        traj.states.push_back(s);
    }
    associate_lanes(traj, lanes);
    traj.source_road = associate_road(traj, lanes);
    return traj;
}

void fill_dims(VehicleSpec& v, bool truck, std::mt19937_64& rng) {
    v.cls = truck ? ObjectClass::Truck : ObjectClass::Car;
    v.length = truck ? uniform(rng, {12.0, 16.5}) : uniform(rng, {4.0, 5.0});
    v.width = truck ? uniform(rng, {2.45, 2.55}) : uniform(rng, {1.75, 1.95});
}

double to_x(const SynthConfig& cfg, double pos) {
    return cfg.merge_start_s + pos * (cfg.ramp_length - cfg.merge_start_s);
}

double to_pos(const SynthConfig& cfg, double x) {
    return (x - cfg.merge_start_s) / (cfg.ramp_length - cfg.merge_start_s);
}

GroundTruth truth_for(const VehicleSpec& v, const SynthConfig& cfg) {
    GroundTruth gt;
    gt.object_id = v.id;
    gt.label = v.label;
    gt.late = v.late;
    if (v.label == TruthLabel::None) return gt;
    const double w = cfg.lane_width;
    const double settle = v.late ? 1.75 * w : 0.75 * w;
    std::optional<double> x_on;
    std::optional<double> x_off;
    bool peaked = false;
    for (double x = v.x_entry; x <= v.x_exit; x += 0.01) {
        const double off = v.profile.y(x) - v.profile.y0;
        if (!x_on && off >= 0.2 * w) x_on = x;
        if (v.label == TruthLabel::Merge) {
            if (!x_off && off >= settle) x_off = x;
        } else {
            if (x_on && off >= 0.3 * w) peaked = true;
            if (peaked && !x_off && off < 0.2 * w) x_off = x;
        }
    }
    auto frame_of = [&](double x) { return static_cast<std::int64_t>(std::lround(v.t_at_x(x) * cfg.rate_hz)); };
    if (x_on) {
        gt.start_pos = to_pos(cfg, *x_on);
        gt.start_frame = frame_of(*x_on);
    }
    if (x_off) {
        gt.end_pos = to_pos(cfg, *x_off);
        gt.end_frame = frame_of(*x_off);
    }
    return gt;
}

}  // namespace

LaneModel synth_lane_model(const SynthConfig& cfg) {
    const double w = cfg.lane_width;
    const double sp = cfg.vertex_spacing;
    std::vector<Lane> lanes;
    lanes.push_back(Lane{"main_1", LaneKind::Mainline, straight(cfg.mainline_begin, cfg.mainline_end, w, sp),
                         straight(cfg.mainline_begin, cfg.mainline_end, 0.0, sp),
                         straight(cfg.mainline_begin, cfg.mainline_end, 0.5 * w, sp)});
    lanes.push_back(Lane{"main_2", LaneKind::Mainline, straight(cfg.mainline_begin, cfg.mainline_end, 2.0 * w, sp),
                         straight(cfg.mainline_begin, cfg.mainline_end, w, sp),
                         straight(cfg.mainline_begin, cfg.mainline_end, 1.5 * w, sp)});
    lanes.push_back(Lane{"ramp", LaneKind::OnRamp, straight(0.0, cfg.ramp_length, 0.0, sp),
                         straight(0.0, cfg.ramp_length, -w, sp), straight(0.0, cfg.ramp_length, -0.5 * w, sp)});
    return LaneModel(std::move(lanes), cfg.merge_start_s, cfg.ramp_length - cfg.merge_start_s);
}

namespace {

LabeledDataset assemble(std::vector<VehicleSpec> specs, const SynthConfig& cfg, LaneModel lanes,
                        std::mt19937_64& noise_rng) {
    for (VehicleSpec& v : specs) sample_frames(v, cfg.rate_hz);

    LabeledDataset ds{{}, std::move(lanes), {}};
    for (const VehicleSpec& v : specs) {
        if (v.last_frame <= v.first_frame) continue;
        ds.trajectories.push_back(sample(v, cfg, noise_rng, ds.lanes));
        GroundTruth gt = truth_for(v, cfg);
        if (v.label != TruthLabel::None) {
            for (const VehicleSpec& ch : specs) {
                if (!ch.on_main_1 || ch.last_frame <= ch.first_frame) continue;
                if (const auto p = closed_form_pet(v, ch, cfg.rate_hz)) gt.challengers.push_back({ch.id, *p});
            }
        }
        ds.labels.push_back(std::move(gt));
    }
    return ds;
}

}  // namespace

LabeledDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const double w = cfg.lane_width;
    std::vector<VehicleSpec> specs;

    // Mainline traffic, lane keeping at constant speed.
    const int n_right = cfg.n_mainline - cfg.n_mainline / 2;
    const int n_left = cfg.n_mainline / 2;
    for (int lane = 0; lane < 2; ++lane) {
        const int n = lane == 0 ? n_right : n_left;
        double t = uniform(rng, {0.0, cfg.mainline_headway_s.hi});
        for (int i = 0; i < n; ++i) {
            VehicleSpec v;
            const bool truck = lane == 0 && uniform(rng, {0.0, 1.0}) < cfg.truck_fraction;
            fill_dims(v, truck, rng);
            v.v = uniform(rng, lane == 0 ? cfg.right_lane_speed : cfg.left_lane_speed);
            v.t_entry = t;
            v.x_entry = cfg.mainline_begin + 1.0;
            v.x_exit = cfg.mainline_end - 1.0;
            v.profile.y0 = (lane == 0 ? 0.5 : 1.5) * w + uniform(rng, {-cfg.mainline_lateral_bias, cfg.mainline_lateral_bias});
            v.on_main_1 = lane == 0;
            specs.push_back(v);
            t += uniform(rng, cfg.mainline_headway_s);
        }
    }

    // Ramp traffic in shuffled maneuver order.
    std::vector<int> kinds;
    kinds.insert(kinds.end(), static_cast<std::size_t>(cfg.n_merging), 0);
    kinds.insert(kinds.end(), static_cast<std::size_t>(cfg.n_aborting), 1);
    kinds.insert(kinds.end(), static_cast<std::size_t>(cfg.n_late_merges), 2);
    std::shuffle(kinds.begin(), kinds.end(), rng);
    double t = uniform(rng, {0.0, cfg.ramp_headway_s.hi});
    const double y_ramp = -0.5 * w;
    for (int kind : kinds) {
        VehicleSpec v;
        fill_dims(v, uniform(rng, {0.0, 1.0}) < cfg.truck_fraction, rng);
        v.v = uniform(rng, cfg.ramp_speed);
        v.t_entry = t;
        v.x_entry = 1.0;
        v.x_exit = cfg.mainline_end - 1.0;
        if (kind == 0) {
            const double on = uniform(rng, cfg.merge_start_pos);
            const double span = uniform(rng, cfg.merge_span);
            v.profile = merge_profile(y_ramp, w, to_x(cfg, on), to_x(cfg, on + span), 0.2, 0.75);
            v.label = TruthLabel::Merge;
        } else if (kind == 1) {
            const double on = uniform(rng, cfg.abort_start_pos);
            const double span = uniform(rng, cfg.abort_span);
            const double peak = uniform(rng, cfg.abort_peak);
            Profile p;
            p.kind = Profile::Kind::Bump;
            p.y0 = y_ramp;
            p.amp = peak * w;
            p.lambda = 0.15 * span * (cfg.ramp_length - cfg.merge_start_s);
            p.x_a = to_x(cfg, on) + p.lambda;
            p.x_b = to_x(cfg, on + span) - p.lambda;
            v.profile = p;
            v.label = TruthLabel::Abort;
            // The ramp ends; an aborting vehicle is tracked until then.
            v.x_exit = cfg.ramp_length - 1.0;
        } else {
            const double on = uniform(rng, cfg.late_start_pos);
            const double off = uniform(rng, cfg.late_end_pos);
            v.profile = merge_profile(y_ramp, 2.0 * w, to_x(cfg, on), to_x(cfg, off), 0.1, 0.875);
            v.label = TruthLabel::Merge;
            v.late = true;
        }
        specs.push_back(v);
        t += uniform(rng, cfg.ramp_headway_s);
    }

    std::stable_sort(specs.begin(), specs.end(),
                     [](const VehicleSpec& a, const VehicleSpec& b) { return a.t_entry < b.t_entry; });
    for (std::size_t i = 0; i < specs.size(); ++i) specs[i].id = static_cast<std::int64_t>(i + 1);

    std::mt19937_64 noise_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    return assemble(std::move(specs), cfg, synth_lane_model(cfg), noise_rng);
}

LabeledDataset pet_fixture(const SynthConfig& cfg, double pet_s, double speed, double start_pos) {
    cfg.validate();
    const double w = cfg.lane_width;

    VehicleSpec ego;
    ego.id = 2;
    ego.v = speed;
    ego.t_entry = 30.0;
    ego.x_entry = 1.0;
    ego.x_exit = cfg.mainline_end - 1.0;
    ego.profile = merge_profile(-0.5 * w, w, to_x(cfg, start_pos), to_x(cfg, start_pos + 0.25), 0.2, 0.75);
    ego.label = TruthLabel::Merge;
    sample_frames(ego, cfg.rate_hz);

    VehicleSpec ch;
    ch.id = 1;
    ch.v = speed;
    ch.x_entry = cfg.mainline_begin + 1.0;
    ch.x_exit = cfg.mainline_end - 1.0;
    ch.profile.y0 = 0.5 * w;
    ch.on_main_1 = true;
    // Align the challenger with the ego at the middle of the maneuver, then
    // shift it in time so the arrival difference of minimum magnitude
    // becomes pet_s.
    const double x_mid = to_x(cfg, start_pos + 0.125);
    ch.t_entry = ego.t_at_x(x_mid) - (x_mid - ch.x_entry) / ch.v;
    sample_frames(ch, cfg.rate_hz);
    const auto dts = closed_form_dts(ego, ch, cfg.rate_hz, false);
    if (dts.empty()) throw std::logic_error("pet_fixture: corner paths do not cross");
    const double shift = pet_s >= 0.0 ? *std::min_element(dts.begin(), dts.end()) - pet_s
                                      : *std::max_element(dts.begin(), dts.end()) - pet_s;
    ch.t_entry += shift;

    std::mt19937_64 noise_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    return assemble({ch, ego}, cfg, synth_lane_model(cfg), noise_rng);
}

std::string labels_to_json(const std::vector<GroundTruth>& labels) {
    ordered_json root;
    root["objects"] = ordered_json::array();
    auto opt = [](const auto& o) { return o ? ordered_json(*o) : ordered_json(nullptr); };
    for (const GroundTruth& g : labels) {
        ordered_json j;
        j["object_id"] = g.object_id;
        j["label"] = to_string(g.label);
        j["late"] = g.late;
        j["start_pos"] = opt(g.start_pos);
        j["end_pos"] = opt(g.end_pos);
        j["start_frame"] = opt(g.start_frame);
        j["end_frame"] = opt(g.end_frame);
        j["challengers"] = ordered_json::array();
        for (const TruthChallenger& c : g.challengers) {
            j["challengers"].push_back({{"challenger_id", c.challenger_id}, {"pet_s", c.pet}});
        }
        root["objects"].push_back(std::move(j));
    }
    return root.dump(2) + "\n";
}

std::vector<GroundTruth> parse_labels(const std::string& json_text) {
    std::vector<GroundTruth> out;
    try {
        const auto root = ordered_json::parse(json_text);
        for (const auto& j : root.at("objects")) {
            GroundTruth g;
            g.object_id = j.at("object_id").get<std::int64_t>();
            g.label = truth_label_from_string(j.at("label").get<std::string>());
            g.late = j.value("late", false);
            if (j.contains("start_pos") && !j["start_pos"].is_null()) g.start_pos = j["start_pos"].get<double>();
            if (j.contains("end_pos") && !j["end_pos"].is_null()) g.end_pos = j["end_pos"].get<double>();
            if (j.contains("start_frame") && !j["start_frame"].is_null()) g.start_frame = j["start_frame"].get<std::int64_t>();
            if (j.contains("end_frame") && !j["end_frame"].is_null()) g.end_frame = j["end_frame"].get<std::int64_t>();
            if (j.contains("challengers")) {
                for (const auto& c : j["challengers"]) {
                    g.challengers.push_back({c.at("challenger_id").get<std::int64_t>(), c.at("pet_s").get<double>()});
                }
            }
            out.push_back(std::move(g));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("labels: ") + e.what());
    }
    return out;
}

std::vector<GroundTruth> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open labels file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_labels(buf.str());
}

void write_dataset(const LabeledDataset& ds, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    {
        std::ofstream out(base / "trajectories.csv");
        write_trajectories_csv(out, ds.trajectories);
    }
    {
        std::ofstream out(base / "lanes.json");
        out << lane_model_to_json(ds.lanes);
    }
    {
        std::ofstream out(base / "labels.json");
        out << labels_to_json(ds.labels);
    }
}

}  // namespace onramp
