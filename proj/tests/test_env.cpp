#include <doctest.h>

#include <cmath>

#include "patrol/env.hpp"
#include "patrol/errors.hpp"
#include "patrol/rng.hpp"
#include "test_support.hpp"

using namespace patrol;
using namespace patrol::testing;

TEST_CASE("reward: indicator per zone, max over agents") {
    const FloorPlan plan = FloorPlan::office_plan();

    SUBCASE("all agents outside all zones") {
        const JointState s{{{1, 6}, {10, 6}, {22, 6}}, 0};
        const RewardVector r = reward(s, plan);
        for (int m = 0; m < r.size(); ++m) CHECK(r[m] == 0);
    }
    SUBCASE("agent exactly at the first zone center (6,9)") {
        const RewardVector r = reward({{{6, 9}}, 0}, plan);
        CHECK(r[0] == 1);
        for (int m = 1; m < r.size(); ++m) CHECK(r[m] == 0);
    }
    SUBCASE("two agents in the same zone saturate at 1") {
        const FloorPlan room = open_room({{4, 6}, {10, 6}, {16, 6}});
        const RewardVector r = reward({{{9.5, 6}, {10.5, 6}}, 0}, room);
        CHECK(r[0] == 0);
        CHECK(r[1] == 1);
        CHECK(r[2] == 0);
    }
    SUBCASE("zone membership is boundary-inclusive") {
        const RewardVector r = reward({{{7, 9}}, 0}, plan);  // distance exactly 1
        CHECK(r[0] == 1);
    }
}

TEST_CASE("reward properties: permutation invariance and monotonicity") {
    const FloorPlan plan = FloorPlan::office_plan();
    RngStream rng(7, "reward_props");
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Vec2> pos;
        for (int i = 0; i < 4; ++i) pos.push_back(sample_free_position(plan, rng));
        const RewardVector base = reward({pos, 0}, plan);

        std::vector<Vec2> shuffled = {pos[2], pos[0], pos[3], pos[1]};
        const RewardVector perm = reward({shuffled, 0}, plan);
        CHECK(base.values == perm.values);

        std::vector<Vec2> more = pos;
        more.push_back(sample_free_position(plan, rng));
        const RewardVector bigger = reward({more, 0}, plan);
        for (int m = 0; m < base.size(); ++m) CHECK(bigger[m] >= base[m]);
    }
}

TEST_CASE("observe_tile: containment with lowest-index tie-break") {
    const FloorPlan plan = FloorPlan::office_plan();
    CHECK(observe_tile(plan.tiles[0].center(), plan) == 0);
    CHECK(observe_tile({8, 10}, plan) == 0);  // boundary shared by tiles 0 and 1
    CHECK(observe_tile({24, 6}, plan) == 8);  // corridor boundary, lowest wins

    RngStream rng(9, "tiles");
    for (int i = 0; i < 500; ++i) {
        const int t = observe_tile(sample_free_position(plan, rng), plan);
        CHECK(t >= 0);
        CHECK(t < plan.n_tiles());
    }
    CHECK_THROWS_AS(observe_tile({5, 2}, plan), UsageError);    // dead space
    CHECK_THROWS_AS(observe_tile({-1, -1}, plan), UsageError);  // out of bounds
}

TEST_CASE("step: fixed point and clamped arrival") {
    const FloorPlan plan = FloorPlan::office_plan();

    JointState s{{plan.zones[2].center}, 0};
    JointState next = step(s, {{2}}, plan, 0.5);
    CHECK(next.positions[0] == plan.zones[2].center);
    CHECK(next.time == 1);

    s.positions[0] = {plan.zones[2].center.x - 0.3, plan.zones[2].center.y};
    next = step(s, {{2}}, plan, 0.5);
    CHECK(distance(next.positions[0], plan.zones[2].center) == doctest::Approx(0.0));
}

TEST_CASE("step: cross-room route passes a door waypoint, bounded displacement") {
    const FloorPlan plan = FloorPlan::office_plan();
    const double speed = 0.5;

    // Exhaustive path enumeration oracle on the waypoint graph agrees with
    // the controller's route length from a zone center.
    const int start_wp = plan.zone_waypoint(0);
    const int goal_wp = plan.zone_waypoint(4);
    const double oracle_len = oracle_shortest_path(plan, start_wp, goal_wp);
    CHECK(plan.route_length(plan.zones[0].center, 4) == doctest::Approx(oracle_len));

    JointState s{{plan.zones[0].center}, 0};
    const Vec2 door{4, 7};
    bool passed_door = false;
    const int budget = static_cast<int>(std::ceil(oracle_len / speed));
    for (int t = 0; t < budget; ++t) {
        std::vector<std::vector<Vec2>> paths;
        const JointState n = step(s, {{4}}, plan, speed, &paths);
        CHECK(distance(n.positions[0], s.positions[0]) <= speed + 1e-9);
        for (std::size_t leg = 0; leg + 1 < paths[0].size(); ++leg) {
            CHECK(displacement_stays_valid(plan, paths[0][leg], paths[0][leg + 1]));
            // Leaving the room requires crossing the 1 m door gap around (4,7).
            if (point_segment_distance(door, {paths[0][leg], paths[0][leg + 1]}) <= 0.55)
                passed_door = true;
        }
        s = n;
    }
    CHECK(passed_door);
    CHECK(distance(s.positions[0], plan.zones[4].center) == doctest::Approx(0.0));
}

TEST_CASE("step: repeated application reaches the target within ceil(L/speed)") {
    const FloorPlan plan = FloorPlan::office_plan();
    RngStream rng(11, "step_props");
    for (int trial = 0; trial < 40; ++trial) {
        JointState s{{sample_free_position(plan, rng)}, 0};
        const int zone = static_cast<int>(rng.uniform_int(plan.n_zones()));
        const double speed = rng.uniform(0.2, 1.0);
        const double len = plan.route_length(s.positions[0], zone);
        const int steps = static_cast<int>(std::ceil(len / speed));
        for (int t = 0; t < steps; ++t) {
            std::vector<std::vector<Vec2>> paths;
            const JointState n = step(s, {{zone}}, plan, speed, &paths);
            for (std::size_t leg = 0; leg + 1 < paths[0].size(); ++leg)
                CHECK(displacement_stays_valid(plan, paths[0][leg], paths[0][leg + 1]));
            s = n;
        }
        CHECK(distance(s.positions[0], plan.zones[zone].center) < 1e-7);
    }
}

TEST_CASE("line_of_sight") {
    const FloorPlan plan = FloorPlan::office_plan();

    CHECK(line_of_sight({3, 10}, {3, 10}, plan));          // degenerate
    CHECK(line_of_sight({1, 8}, {7, 13}, plan));           // same convex room
    CHECK_FALSE(line_of_sight({6, 9}, {13, 9}, plan));     // wall x=8 between rooms
    CHECK_FALSE(line_of_sight({28, 4}, {28, 8}, plan));    // lab divider y=6

    // Against the independent parametric intersection oracle.
    RngStream rng(13, "los");
    for (int trial = 0; trial < 400; ++trial) {
        const Vec2 a = sample_free_position(plan, rng);
        const Vec2 b = sample_free_position(plan, rng);
        bool oracle_clear = true;
        for (const Segment& w : plan.walls)
            if (oracle_segments_intersect({a, b}, w)) {
                oracle_clear = false;
                break;
            }
        CHECK(line_of_sight(a, b, plan) == oracle_clear);
    }
}

TEST_CASE("floor plan invariants and JSON round trip") {
    const FloorPlan plan = FloorPlan::office_plan();
    CHECK(plan.n_zones() == 6);
    CHECK(plan.n_tiles() == 12);

    const FloorPlan loaded = FloorPlan::from_json_text(plan.to_json_text());
    CHECK(loaded.n_zones() == plan.n_zones());
    CHECK(loaded.n_tiles() == plan.n_tiles());
    CHECK(loaded.waypoints.size() == plan.waypoints.size());
    CHECK(loaded.route_length({2, 6}, 5) == doctest::Approx(plan.route_length({2, 6}, 5)));

    FloorPlan bad = FloorPlan::smoke_plan();
    bad.zones[0].center = {0.5, 0.5};  // overlaps the outer wall
    CHECK_THROWS_AS(bad.finalize(), ConfigError);
}

TEST_CASE("unreachable target is a configuration error") {
    FloorPlan p;
    p.bounds = {0, 0, 10, 10};
    p.walls = {{{5, 0}, {5, 10}}};
    p.zones = {{{2, 5}, 1.0, 0}, {{8, 5}, 1.0, 1}};
    p.tiles = {{0, 0, 5, 10}, {5, 0, 10, 10}};
    p.waypoints = {{2, 5}, {8, 5}};
    p.waypoint_edges = {};  // no edges: graph disconnected
    CHECK_THROWS_AS(p.finalize(), ConfigError);
}
