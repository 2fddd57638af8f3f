#include <doctest.h>

#include <cmath>
#include <random>

#include "onramp/assessment.hpp"
#include "onramp/extraction.hpp"
#include "onramp/synth.hpp"
#include "support.hpp"

using namespace onramp;
using doctest::Approx;

namespace {

ConflictPoint at_dt(double dt) { return ConflictPoint{{0, 0}, 10.0 + dt, 10.0}; }

const Trajectory& by_id(const LabeledDataset& ds, std::int64_t id) {
    for (const Trajectory& t : ds.trajectories) {
        if (t.object_id == id) return t;
    }
    throw std::runtime_error("no such object");
}

}  // namespace

TEST_SUITE("assessment") {

TEST_CASE("corner positions") {
    const auto t = testing::make_trajectory(1, {{0, 0, 0, 0.0}, {1, 0, 0, std::acos(-1.0) / 2}}, 2.0, 4.0);
    const CornerTrack left = corner_tracks(t, Side::Left);
    CHECK(left.front[0].x == Approx(2.0));
    CHECK(left.front[0].y == Approx(1.0));
    CHECK(left.rear[0].x == Approx(-2.0));
    CHECK(left.rear[0].y == Approx(1.0));
    CHECK(left.front[1].x == Approx(-1.0));
    CHECK(left.front[1].y == Approx(2.0));
    const CornerTrack right = corner_tracks(t, Side::Right);
    CHECK(right.front[0].y == Approx(-1.0));
    CHECK(right.front[1].x == Approx(1.0));
}

TEST_CASE("first crossing of timed paths") {
    const std::vector<Vec2> a{{0, 0}, {10, 0}};
    const std::vector<double> ta{0, 10};
    const std::vector<Vec2> parallel{{0, 1}, {10, 1}};
    CHECK_FALSE(first_crossing(a, ta, parallel, ta));

    const std::vector<Vec2> cross{{4, -5}, {4, 5}};
    const std::vector<double> tc{0, 2};
    const auto hit = first_crossing(a, ta, cross, tc);
    REQUIRE(hit);
    CHECK(hit->point.x == Approx(4.0));
    CHECK(hit->t_ego == Approx(4.0));
    CHECK(hit->t_challenger == Approx(1.0));
    CHECK(hit->dt() == Approx(3.0));

    // Weaving path crossing y = 0 three times; the earliest along `a` wins.
    std::vector<Vec2> weave;
    std::vector<double> tw;
    for (int k = 0; k <= 60; ++k) {
        weave.push_back({2.0 + 0.1 * k, std::sin(k * 0.25) + 0.5});
        tw.push_back(k);
    }
    std::vector<Vec2> line;
    std::vector<double> tl;
    for (int k = 0; k <= 100; ++k) {
        line.push_back({0.1 * k, 0.0});
        tl.push_back(0.1 * k);
    }
    const auto first = first_crossing(line, tl, weave, tw);
    REQUIRE(first);
    double expected = 1e9;
    for (std::size_t i = 0; i + 1 < weave.size(); ++i) {
        if ((weave[i].y > 0) != (weave[i + 1].y > 0)) {
            const double u = weave[i].y / (weave[i].y - weave[i + 1].y);
            expected = std::min(expected, weave[i].x + u * (weave[i + 1].x - weave[i].x));
        }
    }
    CHECK(first->point.x == Approx(expected).epsilon(1e-9));
}

TEST_CASE("PET takes the conflict point of minimum magnitude") {
    const PetResult r = pet_from_points(7, {at_dt(4.0), at_dt(3.5), at_dt(-3.2), at_dt(3.3)});
    REQUIRE(r.pet);
    CHECK(*r.pet == Approx(-3.2));
    CHECK_FALSE(r.degenerate);
    CHECK(r.collision_warning);
    CHECK(r.challenger_id == 7);

    const PetResult behind = pet_from_points(1, {at_dt(2.0), at_dt(1.5)});
    CHECK(*behind.pet == Approx(1.5));
    CHECK_FALSE(behind.collision_warning);
    const PetResult front = pet_from_points(1, {at_dt(-2.0), at_dt(-2.5)});
    CHECK(*front.pet == Approx(-2.0));

    const PetResult none = pet_from_points(1, {});
    CHECK(none.degenerate);
    CHECK_FALSE(none.pet);
}

TEST_CASE("crossing tracks: time shift, rigid motion and role swap") {
    // Ego drives +x, challenger drives +y through (50, 0).
    const Trajectory ego = testing::straight_track(1, {0, 0}, {10, 0}, 0, 10, 25);
    const Trajectory ch = testing::straight_track(2, {50, -40}, {0, 10}, 1, 11, 25);
    const PetResult base = pet(ego, ch);
    REQUIRE(base.pet);
    CHECK_FALSE(base.degenerate);

    SUBCASE("a common time shift leaves PET unchanged") {
        Trajectory e2 = ego;
        Trajectory c2 = ch;
        for (auto& s : e2.states) s.t += 100.0;
        for (auto& s : c2.states) s.t += 100.0;
        CHECK(*pet(e2, c2).pet == Approx(*base.pet).epsilon(1e-9));
    }
    SUBCASE("delaying the challenger shifts every conflict time difference") {
        Trajectory c2 = ch;
        for (auto& s : c2.states) s.t += 0.5;
        const PetResult delayed = pet(ego, c2);
        REQUIRE(delayed.points.size() == base.points.size());
        for (std::size_t k = 0; k < base.points.size(); ++k) {
            CHECK(delayed.points[k].dt() == Approx(base.points[k].dt() - 0.5).epsilon(1e-9));
        }
    }
    SUBCASE("rigid motion leaves PET unchanged") {
        const double angle = -1.1;
        const Vec2 shift{300, 700};
        const PetResult moved = pet(testing::transform_trajectory(ego, angle, shift),
                                    testing::transform_trajectory(ch, angle, shift));
        CHECK(*moved.pet == Approx(*base.pet).epsilon(1e-9));
    }
    SUBCASE("swapping roles flips the sign") {
        const PetResult swapped = pet(ch, ego, Side::Right, Side::Left);
        REQUIRE(swapped.pet);
        CHECK(*swapped.pet == Approx(-*base.pet).epsilon(1e-9));
    }
}

TEST_CASE("parallel tracks never conflict") {
    const Trajectory a = testing::straight_track(1, {0, 0}, {25, 0}, 0, 10, 25);
    const Trajectory b = testing::straight_track(2, {30, 3.75}, {25, 0}, 0, 10, 25);
    const PetResult r = pet(a, b);
    CHECK(r.degenerate);
    CHECK(r.points.empty());
}

TEST_CASE("challengers are the target-lane vehicles in the vicinity") {
    const LaneModel m = testing::straight_scene();
    std::vector<Trajectory> all;
    all.push_back(testing::straight_track(1, {0, -1.875}, {25, 0}, 0, 10, 25));   // ego on the ramp
    all.push_back(testing::straight_track(2, {50, 1.875}, {25, 0}, 0, 10, 25));   // main_1, 50 m ahead
    all.push_back(testing::straight_track(3, {-150, 1.875}, {25, 0}, 0, 10, 25));  // main_1, 150 m behind
    all.push_back(testing::straight_track(4, {10, 5.625}, {25, 0}, 0, 10, 25));   // main_2
    all.push_back(testing::straight_track(5, {-90, 1.875}, {25, 0}, 0, 10, 25));  // main_1, 90 m behind
    for (auto& t : all) associate_lanes(t, m);
    ScenarioRecord rec;
    rec.target_lane = "main_1";
    rec.cross_entry_t = 4.0;
    const auto sel = select_challengers(rec, all[0], all, m, 100.0);
    std::vector<std::int64_t> ids;
    for (const Trajectory* t : sel) ids.push_back(t->object_id);
    CHECK(ids == std::vector<std::int64_t>{2, 5});
    CHECK(select_challengers(rec, all[0], all, m, 60.0).size() == 1);

    rec.target_lane = "ramp";
    CHECK(select_challengers(rec, all[0], all, m).empty());
    rec.target_lane = "";
    CHECK(select_challengers(rec, all[0], all, m).empty());
}

TEST_CASE("PET fixture matches the closed form for both signs") {
    SynthConfig cfg;
    for (double target : {3.0, -3.0, 1.2, -0.8}) {
        const LabeledDataset ds = pet_fixture(cfg, target);
        const PetResult r = pet(by_id(ds, 2), by_id(ds, 1));
        REQUIRE(r.pet);
        CHECK(std::abs(*r.pet - target) <= 1.5 / cfg.rate_hz);
        CHECK((*r.pet > 0) == (target > 0));
    }
}

TEST_CASE("synthetic PETs agree with the generator's closed form") {
    SynthConfig cfg = testing::only(8, 0, 30);
    cfg.seed = 3;
    const LabeledDataset ds = generate(cfg);
    std::size_t checked = 0;
    for (const GroundTruth& g : ds.labels) {
        for (const TruthChallenger& c : g.challengers) {
            const PetResult r = pet(by_id(ds, g.object_id), by_id(ds, c.challenger_id));
            REQUIRE(r.pet);
            CHECK(std::abs(*r.pet - c.pet) <= 1.5 / cfg.rate_hz);
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("state interpolation") {
    const Trajectory t = testing::straight_track(1, {0, 0}, {10, 0}, 2, 4, 25);
    CHECK_FALSE(state_at(t, 1.9));
    CHECK_FALSE(state_at(t, 4.1));
    const auto mid = state_at(t, 3.01);
    REQUIRE(mid);
    CHECK(mid->position.x == Approx(10.1));
}

}  // TEST_SUITE
