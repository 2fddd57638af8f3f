#include <doctest.h>

#include <random>

#include "onramp/errors.hpp"
#include "onramp/geometry.hpp"
#include "support.hpp"

using namespace onramp;
using doctest::Approx;

namespace {

Polyline random_polyline(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> step(0.5, 5.0);
    std::uniform_real_distribution<double> turn(-0.6, 0.6);
    std::vector<Vec2> pts{{0.0, 0.0}};
    double heading = 0.0;
    for (int i = 1; i < n; ++i) {
        heading += turn(rng);
        const double d = step(rng);
        pts.push_back(pts.back() + Vec2{d * std::cos(heading), d * std::sin(heading)});
    }
    return Polyline(pts);
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("projection of endpoints and a lateral point") {
    const Polyline line({{0, 0}, {10, 0}});
    auto p0 = project({0, 0}, line);
    CHECK(p0.s == 0.0);
    CHECK(p0.d == 0.0);
    CHECK_FALSE(p0.extrapolated);
    auto p1 = project({10, 0}, line);
    CHECK(p1.s == 10.0);
    CHECK(p1.d == 0.0);

    const Polyline axis({{0, 0}, {100, 0}});
    auto p = project({30, 2}, axis);
    CHECK(p.s == Approx(30.0).epsilon(1e-12));
    CHECK(p.d == Approx(2.0).epsilon(1e-12));
    CHECK(project({30, -2}, axis).d == Approx(-2.0));
}

TEST_CASE("projection beyond the ends extrapolates and is flagged") {
    const Polyline line({{0, 0}, {10, 0}, {20, 0}});
    auto before = project({-5, 1}, line);
    CHECK(before.extrapolated);
    CHECK(before.s == Approx(-5.0));
    CHECK(before.d == Approx(1.0));
    auto after = project({27, -3}, line);
    CHECK(after.extrapolated);
    CHECK(after.s == Approx(27.0));
    CHECK(after.d == Approx(-3.0));
}

TEST_CASE("equidistant segments resolve to the smallest arc length") {
    // Corner at (10, 0); (5, 5) is 5 m from both legs.
    const Polyline line({{0, 0}, {10, 0}, {10, 10}});
    auto p = project({5, 5}, line);
    CHECK(p.s == Approx(5.0));
    CHECK(p.d == Approx(5.0));
}

TEST_CASE("invalid polylines are rejected") {
    CHECK_THROWS_AS(Polyline({{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Polyline({{0, 0}, {0, 0}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Polyline({{0, 0}, {NAN, 1}}), std::invalid_argument);
}

TEST_CASE("points on a polyline project to their own arc length") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Polyline line = random_polyline(rng, 2 + trial % 12);
        const double s = frac(rng) * line.length();
        const Vec2 q = line.point_at(s);
        const auto p = line.project(q);
        CHECK(std::abs(p.d) < 1e-9);
        // A sharp turn can bring another leg equally close; the arc length must
        // then still name a point at the same location.
        CHECK(distance(line.point_at(p.s), q) < 1e-9);
    }
}

TEST_CASE("projection is idempotent on the foot point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> off(-8.0, 8.0);
    for (int trial = 0; trial < 200; ++trial) {
        const Polyline line = random_polyline(rng, 3 + trial % 10);
        const Vec2 q{off(rng) + line.length() / 2, off(rng)};
        const auto p = line.project(q);
        const Vec2 foot = line.point_at(p.s);
        const auto again = line.project(foot);
        CHECK(std::abs(again.d) < 1e-9);
        CHECK(distance(line.point_at(again.s), foot) < 1e-9);
    }
}

TEST_CASE("vertex arc lengths accumulate segment lengths") {
    const Polyline line({{0, 0}, {3, 4}, {3, 10}});
    CHECK(line.arc_length(0) == 0.0);
    CHECK(line.arc_length(1) == Approx(5.0));
    CHECK(line.arc_length(2) == Approx(11.0));
    CHECK(line.length() == Approx(11.0));
    CHECK(project({3, 4}, line).s == Approx(5.0));
}

TEST_CASE("normalized maneuver position") {
    // Straight 200 m ramp, start line at s = 40 m, reference length 160 m.
    std::vector<Lane> lanes;
    lanes.push_back({"main", LaneKind::Mainline, Polyline({{0, 8}, {200, 8}}), Polyline({{0, 4}, {200, 4}}),
                     Polyline({{0, 6}, {200, 6}})});
    lanes.push_back({"ramp", LaneKind::OnRamp, Polyline({{0, 4}, {200, 4}}), Polyline({{0, 0}, {200, 0}}),
                     Polyline({{0, 2}, {200, 2}})});
    const LaneModel m(lanes, 40.0, 160.0);
    CHECK(normalized_maneuver_position({120, 2}, m) == Approx(0.5).epsilon(1e-12));
    CHECK(normalized_maneuver_position({40, 3}, m) == Approx(0.0));
    CHECK(normalized_maneuver_position({200, 3}, m) == Approx(1.0));
    CHECK(normalized_maneuver_position({264, 3}, m) == Approx(1.4));

    // Affine in s: doubling the reference length halves (value - offset).
    const LaneModel wide(lanes, 40.0, 320.0);
    for (double x : {10.0, 55.0, 130.0, 190.0}) {
        CHECK(normalized_maneuver_position({x, 2}, wide) == Approx(0.5 * normalized_maneuver_position({x, 2}, m)));
    }
}

TEST_CASE("segment intersection examples") {
    auto hit = segment_intersection({0, 0}, {2, 0}, {1, -1}, {1, 1});
    REQUIRE(hit);
    CHECK(hit->point.x == Approx(1.0));
    CHECK(hit->point.y == Approx(0.0));
    CHECK(hit->u == Approx(0.5));
    CHECK(hit->v == Approx(0.5));
    CHECK_FALSE(hit->degenerate);

    CHECK_FALSE(segment_intersection({0, 0}, {1, 0}, {2, 0}, {3, 0}));

    auto diag = segment_intersection({0, 0}, {4, 4}, {0, 4}, {4, 0});
    REQUIRE(diag);
    CHECK(diag->point.x == Approx(2.0));
    CHECK(diag->point.y == Approx(2.0));

    CHECK_FALSE(segment_intersection({0, 0}, {1, 0}, {0, 1}, {1, 1}));  // parallel
    CHECK_FALSE(segment_intersection({0, 0}, {1, 1}, {3, 0}, {2, 1}));  // lines cross outside
}

TEST_CASE("collinear overlap returns the overlap midpoint, flagged degenerate") {
    auto hit = segment_intersection({0, 0}, {4, 0}, {2, 0}, {6, 0});
    REQUIRE(hit);
    CHECK(hit->degenerate);
    CHECK(hit->point.x == Approx(3.0));
    CHECK(hit->point.y == Approx(0.0));
}

TEST_CASE("segment intersection is symmetric") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> c(-5.0, 5.0);
    int hits = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const Vec2 a1{c(rng), c(rng)}, a2{c(rng), c(rng)}, b1{c(rng), c(rng)}, b2{c(rng), c(rng)};
        const auto ab = segment_intersection(a1, a2, b1, b2);
        const auto ba = segment_intersection(b1, b2, a1, a2);
        REQUIRE(ab.has_value() == ba.has_value());
        if (!ab) continue;
        ++hits;
        CHECK(ab->point == ba->point);
        CHECK(ab->u == ba->v);
        CHECK(ab->v == ba->u);
        // The point lies on both segments.
        CHECK(distance(ab->point, a1 + ab->u * (a2 - a1)) < 1e-9);
        CHECK(distance(ab->point, b1 + ab->v * (b2 - b1)) < 1e-9);
    }
    CHECK(hits > 100);
}

TEST_CASE("lane model validation") {
    const Polyline l({{0, 4}, {100, 4}});
    const Polyline r({{0, 0}, {100, 0}});
    const Polyline c({{0, 2}, {100, 2}});
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::Mainline, l, r, c}}, 10, 50), InputError);
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::OnRamp, l, r, c}}, 10, 50), InputError);
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::OnRamp, l, r, c}, {"b", LaneKind::OnRamp, l, r, c}}, 10, 50),
                    InputError);
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::OnRamp, l, r, c}, {"a", LaneKind::Mainline, l, r, c}}, 10, 50),
                    InputError);
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::OnRamp, l, r, c}, {"b", LaneKind::Mainline, l, r, c}}, 100, 50),
                    InputError);
    CHECK_THROWS_AS(LaneModel({{"a", LaneKind::OnRamp, l, r, c}, {"b", LaneKind::Mainline, l, r, c}}, 10, 0),
                    InputError);
    CHECK_NOTHROW(LaneModel({{"a", LaneKind::OnRamp, l, r, c}, {"b", LaneKind::Mainline, l, r, c}}, 0, 50));
}

TEST_CASE("lane location, lateral info and neighbors") {
    const LaneModel m = testing::straight_scene(3.75);
    REQUIRE(m.find("main_1") == 0);
    REQUIRE(m.find("main_2") == 1);
    REQUIRE(m.find("ramp") == 2);
    CHECK(m.find("nope") == -1);
    CHECK(m.on_ramp_index() == 2);

    CHECK(m.locate({100, 1.0}) == 0);
    CHECK(m.locate({100, 5.0}) == 1);
    CHECK(m.locate({100, -1.0}) == 2);
    CHECK(m.locate({350, -1.0}) == kOffRoad);  // beyond the ramp end
    CHECK(m.locate({100, 9.0}) == kOffRoad);

    const auto info = m.lateral(0, {100, 2.875});
    CHECK(info.offset == Approx(1.0));
    CHECK(info.width == Approx(3.75));
    CHECK(info.to_left == Approx(-0.875));
    CHECK(info.to_right == Approx(2.875));

    CHECK(m.neighbor(2, true) == 0);
    CHECK(m.neighbor(0, true) == 1);
    CHECK(m.neighbor(0, false) == 2);
    CHECK(m.neighbor(1, true) == -1);
}

TEST_CASE("lane JSON round trip") {
    const LaneModel m = testing::straight_scene();
    const LaneModel back = parse_lane_model(lane_model_to_json(m));
    REQUIRE(back.size() == m.size());
    for (int i = 0; i < m.size(); ++i) {
        CHECK(back.lane(i).id == m.lane(i).id);
        CHECK(back.lane(i).kind == m.lane(i).kind);
        CHECK(back.lane(i).left_border.vertices() == m.lane(i).left_border.vertices());
        CHECK(back.lane(i).right_border.vertices() == m.lane(i).right_border.vertices());
        CHECK(back.lane(i).centerline.vertices() == m.lane(i).centerline.vertices());
    }
    CHECK(back.merge_start_s() == m.merge_start_s());
    CHECK(back.merge_ref_length() == m.merge_ref_length());
    CHECK_THROWS_AS(parse_lane_model("{\"lanes\": 3}"), InputError);
    CHECK_THROWS_AS(parse_lane_model("not json"), InputError);
}

}  // TEST_SUITE
