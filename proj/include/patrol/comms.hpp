#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "patrol/floorplan.hpp"
#include "patrol/geometry.hpp"

namespace patrol {

// Static potential-connectivity graph over the agents. Edges are unordered
// agent pairs; the graph must be connected and free of self-loops.
struct FootprintGraph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;

    static FootprintGraph complete(int n);
    static FootprintGraph path(int n);

    void validate() const;  // throws ConfigError
};

int diameter(const FootprintGraph& g);  // hop count; throws if disconnected

// Per-timestep realization of the footprint.
struct GraphSample {
    long time = 0;
    std::vector<std::pair<int, int>> active_edges;
};

std::vector<int> neighbors(const GraphSample& sample, int n);

struct GraphModel {
    enum class Variant { Bernoulli, Proximity };

    Variant variant = Variant::Bernoulli;
    FootprintGraph footprint;
    double p = 1.0;               // Bernoulli edge-presence probability
    double disc = 5.0;            // Proximity range through walls (meters)
    const FloorPlan* plan = nullptr;  // Proximity needs wall geometry
    std::uint64_t seed = 0;

    static GraphModel bernoulli(FootprintGraph g, double p, std::uint64_t seed);
    static GraphModel proximity(int n_agents, double disc, const FloorPlan& plan);
};

// Bernoulli: each footprint edge is active independently with probability p,
// independently across timesteps (pure function of (seed, t, edge)).
// Proximity: an edge is active iff the two agents are in line of sight or
// within `disc` meters of each other; deterministic given positions.
GraphSample sample(const GraphModel& model, long t,
                   const std::optional<std::vector<Vec2>>& positions = std::nullopt);

}  // namespace patrol
