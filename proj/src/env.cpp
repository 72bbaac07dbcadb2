#include "patrol/env.hpp"

#include <string>

#include "patrol/errors.hpp"

namespace patrol {

RewardVector reward(const JointState& state, const FloorPlan& plan) {
    RewardVector r;
    r.values.assign(plan.n_zones(), 0);
    for (int m = 0; m < plan.n_zones(); ++m)
        for (const Vec2& p : state.positions)
            if (plan.zones[m].contains(p)) {
                r.values[m] = 1;
                break;
            }
    return r;
}

std::vector<std::uint8_t> zone_indicator(Vec2 position, const FloorPlan& plan) {
    std::vector<std::uint8_t> ind(plan.n_zones(), 0);
    for (int m = 0; m < plan.n_zones(); ++m)
        if (plan.zones[m].contains(position)) ind[m] = 1;
    return ind;
}

int observe_tile(Vec2 position, const FloorPlan& plan) {
    const int t = plan.tile_index(position);
    if (t < 0)
        throw UsageError("position (" + std::to_string(position.x) + ", " +
                         std::to_string(position.y) + ") is outside free space");
    return t;
}

bool line_of_sight(Vec2 a, Vec2 b, const FloorPlan& plan) { return plan.line_of_sight(a, b); }

namespace {

// Moves one agent along its route for one timestep. The route is replanned
// from the current point after every intermediate waypoint, consuming the
// remaining step budget; every leg is a line-of-sight segment, so the
// displacement never crosses a wall.
Vec2 advance(Vec2 pos, int zone, const FloorPlan& plan, double budget,
             std::vector<Vec2>* path) {
    const Vec2 target = plan.zones[zone].center;
    if (path) path->push_back(pos);
    for (int guard = 0; guard < 64 && budget > 1e-12; ++guard) {
        Vec2 goal;
        if (plan.line_of_sight(pos, target)) {
            goal = target;
        } else {
            int entry = plan.route_entry(pos, zone);
            if (distance(pos, plan.waypoints[entry]) < 1e-12)
                entry = plan.next_hop(entry, plan.zone_waypoint(zone));
            goal = plan.waypoints[entry];
        }
        const double d = distance(pos, goal);
        if (d <= budget) {
            pos = goal;
            budget -= d;
            if (path) path->push_back(pos);
            if (goal == target) break;
        } else {
            const Vec2 dir = goal - pos;
            pos = pos + (budget / d) * dir;
            budget = 0;
            if (path) path->push_back(pos);
        }
    }
    return pos;
}

}  // namespace

JointState step(const JointState& state, const std::vector<Action>& actions,
                const FloorPlan& plan, double speed,
                std::vector<std::vector<Vec2>>* paths) {
    if (static_cast<int>(actions.size()) != state.n_agents())
        throw UsageError("one action per agent required");
    if (speed <= 0) throw UsageError("speed must be positive");
    JointState out;
    out.time = state.time + 1;
    out.positions.reserve(state.positions.size());
    if (paths) paths->assign(state.n_agents(), {});
    for (int n = 0; n < state.n_agents(); ++n) {
        const int zone = actions[n].target_zone;
        if (zone < 0 || zone >= plan.n_zones())
            throw UsageError("action target zone out of range");
        out.positions.push_back(advance(state.positions[n], zone, plan, speed,
                                        paths ? &(*paths)[n] : nullptr));
    }
    return out;
}

Vec2 sample_free_position(const FloorPlan& plan, RngStream& rng) {
    double total = 0;
    for (const Rect& t : plan.tiles) total += t.area();
    double u = rng.uniform() * total;
    const Rect* tile = &plan.tiles.back();
    for (const Rect& t : plan.tiles) {
        if (u < t.area()) {
            tile = &t;
            break;
        }
        u -= t.area();
    }
    // Keep samples strictly interior so they cannot sit exactly on a wall.
    const double eps = 1e-6;
    return {rng.uniform(tile->xmin + eps, tile->xmax - eps),
            rng.uniform(tile->ymin + eps, tile->ymax - eps)};
}

void validate_state(const JointState& state, const FloorPlan& plan) {
    for (const Vec2& p : state.positions) {
        if (!plan.bounds.contains(p)) throw UsageError("agent position outside bounds");
        if (plan.tile_index(p) < 0) throw UsageError("agent position outside free space");
    }
}

}  // namespace patrol
