#pragma once

#include <cstdint>
#include <vector>

#include "patrol/floorplan.hpp"
#include "patrol/rng.hpp"

namespace patrol {

struct JointState {
    std::vector<Vec2> positions;
    long time = 0;

    int n_agents() const { return static_cast<int>(positions.size()); }
};

struct Action {
    int target_zone = 0;
};

// One binary indicator per zone: 1 iff some agent is inside the zone.
struct RewardVector {
    std::vector<std::uint8_t> values;

    int size() const { return static_cast<int>(values.size()); }
    std::uint8_t operator[](int m) const { return values[m]; }
};

RewardVector reward(const JointState& state, const FloorPlan& plan);

// Zone-membership indicator of a single position (the agent's own local
// observation; multiple overlapping zones may all be set).
std::vector<std::uint8_t> zone_indicator(Vec2 position, const FloorPlan& plan);

// Tile containing the position. Throws UsageError if the position is
// outside free space.
int observe_tile(Vec2 position, const FloorPlan& plan);

// Advances every agent by at most `speed` along its waypoint route toward
// the center of its target zone. Throws UsageError on invalid input.
// `paths`, when given, receives each agent's motion polyline for the step
// (start point, any intermediate waypoints, end point); every leg is a
// wall-free line-of-sight segment.
JointState step(const JointState& state, const std::vector<Action>& actions,
                const FloorPlan& plan, double speed,
                std::vector<std::vector<Vec2>>* paths = nullptr);

bool line_of_sight(Vec2 a, Vec2 b, const FloorPlan& plan);

// Uniform draw over free space (area-weighted over tiles).
Vec2 sample_free_position(const FloorPlan& plan, RngStream& rng);

void validate_state(const JointState& state, const FloorPlan& plan);

}  // namespace patrol
