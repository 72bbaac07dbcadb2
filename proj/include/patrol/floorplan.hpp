#pragma once

#include <string>
#include <vector>

#include "patrol/geometry.hpp"

namespace patrol {

struct Zone {
    Vec2 center;
    double radius = 1.0;
    int index = 0;

    // Boundary-inclusive membership.
    bool contains(Vec2 p) const { return distance(p, center) <= radius; }
};

// Static floor-plan geometry: walls, patrol zones, observation tiles and a
// waypoint graph used by the low-level navigation controller. Free space is
// the union of the tiles; the tiles partition it (shared boundaries resolve
// to the lowest tile index).
class FloorPlan {
public:
    Rect bounds;
    std::vector<Segment> walls;
    std::vector<Zone> zones;
    std::vector<Rect> tiles;
    std::vector<Vec2> waypoints;
    std::vector<std::pair<int, int>> waypoint_edges;

    int n_zones() const { return static_cast<int>(zones.size()); }
    int n_tiles() const { return static_cast<int>(tiles.size()); }

    // True iff the open segment (a,b) crosses no wall. a == b is true.
    bool line_of_sight(Vec2 a, Vec2 b) const;

    // Index of the tile containing p, lowest index on shared boundaries;
    // -1 if p is in no tile (outside free space).
    int tile_index(Vec2 p) const;

    bool in_free_space(Vec2 p) const { return tile_index(p) >= 0; }

    // Validates the stated invariants and precomputes the navigation tables.
    // Throws ConfigError on violation.
    void finalize();

    // Waypoint-graph distance from waypoint i to the center of zone m.
    double waypoint_to_zone(int i, int zone) const { return dist_[i][zone_waypoint_[zone]]; }
    int zone_waypoint(int zone) const { return zone_waypoint_[zone]; }
    int next_hop(int from, int to) const { return next_[from][to]; }

    const std::vector<std::vector<int>>& adjacency() const { return adj_; }

    // Waypoints visible from p, with straight-line distances.
    std::vector<std::pair<int, double>> visible_waypoints(Vec2 p) const;

    // Length of the controller's route from p to the center of zone m:
    // min over visible waypoints w of |p-w| + graph distance(w, zone).
    // Throws ConfigError if no waypoint is visible.
    double route_length(Vec2 p, int zone) const;

    // First waypoint of that route (entry point), -1 if p already has
    // line of sight to the zone center (direct leg).
    int route_entry(Vec2 p, int zone) const;

    static FloorPlan office_plan();
    static FloorPlan smoke_plan();

    static FloorPlan from_json_file(const std::string& path);
    static FloorPlan from_json_text(const std::string& text);
    std::string to_json_text() const;

private:
    std::vector<std::vector<int>> adj_;
    std::vector<std::vector<double>> dist_;
    std::vector<std::vector<int>> next_;
    std::vector<int> zone_waypoint_;

    void build_navigation();
    void validate() const;
};

}  // namespace patrol
