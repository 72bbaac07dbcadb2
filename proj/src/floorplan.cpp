#include "patrol/floorplan.hpp"

#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "patrol/errors.hpp"

namespace patrol {

bool FloorPlan::line_of_sight(Vec2 a, Vec2 b) const {
    if (a == b) return true;
    const Segment sight{a, b};
    for (const Segment& w : walls)
        if (segments_intersect(sight, w)) return false;
    return true;
}

int FloorPlan::tile_index(Vec2 p) const {
    for (int i = 0; i < n_tiles(); ++i)
        if (tiles[i].contains(p)) return i;
    return -1;
}

std::vector<std::pair<int, double>> FloorPlan::visible_waypoints(Vec2 p) const {
    std::vector<std::pair<int, double>> out;
    for (int i = 0; i < static_cast<int>(waypoints.size()); ++i)
        if (line_of_sight(p, waypoints[i])) out.emplace_back(i, distance(p, waypoints[i]));
    return out;
}

double FloorPlan::route_length(Vec2 p, int zone) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [w, d] : visible_waypoints(p)) {
        const double total = d + dist_[w][zone_waypoint_[zone]];
        if (total < best) best = total;
    }
    if (!std::isfinite(best))
        throw ConfigError("no waypoint visible from position; zone " + std::to_string(zone) +
                          " is unreachable");
    return best;
}

int FloorPlan::route_entry(Vec2 p, int zone) const {
    const int target = zone_waypoint_[zone];
    if (line_of_sight(p, waypoints[target])) return -1;
    double best = std::numeric_limits<double>::infinity();
    int entry = -1;
    for (const auto& [w, d] : visible_waypoints(p)) {
        const double total = d + dist_[w][target];
        if (total < best) {
            best = total;
            entry = w;
        }
    }
    if (entry < 0)
        throw ConfigError("no waypoint visible from position; zone " + std::to_string(zone) +
                          " is unreachable");
    return entry;
}

void FloorPlan::build_navigation() {
    const int n = static_cast<int>(waypoints.size());
    adj_.assign(n, {});
    for (auto [i, j] : waypoint_edges) {
        if (i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw ConfigError("invalid waypoint edge");
        adj_[i].push_back(j);
        adj_[j].push_back(i);
    }

    // All-pairs shortest paths; the graph is small (tens of nodes).
    const double inf = std::numeric_limits<double>::infinity();
    dist_.assign(n, std::vector<double>(n, inf));
    next_.assign(n, std::vector<int>(n, -1));
    for (int s = 0; s < n; ++s) {
        dist_[s][s] = 0.0;
        next_[s][s] = s;
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        pq.emplace(0.0, s);
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist_[s][u]) continue;
            for (int v : adj_[u]) {
                const double nd = d + distance(waypoints[u], waypoints[v]);
                if (nd < dist_[s][v]) {
                    dist_[s][v] = nd;
                    next_[s][v] = (u == s) ? v : next_[s][u];
                    pq.emplace(nd, v);
                }
            }
        }
    }

    zone_waypoint_.assign(zones.size(), -1);
    for (int m = 0; m < n_zones(); ++m) {
        for (int i = 0; i < n; ++i) {
            if (distance(waypoints[i], zones[m].center) < 1e-9) {
                zone_waypoint_[m] = i;
                break;
            }
        }
        if (zone_waypoint_[m] < 0)
            throw ConfigError("zone " + std::to_string(m) + " center is not a waypoint");
    }
}

void FloorPlan::validate() const {
    if (bounds.width() <= 0 || bounds.height() <= 0) throw ConfigError("empty bounds");
    for (const Zone& z : zones) {
        if (z.radius <= 0) throw ConfigError("zone radius must be positive");
        const Rect inner{bounds.xmin + z.radius, bounds.ymin + z.radius,
                         bounds.xmax - z.radius, bounds.ymax - z.radius};
        if (!inner.contains(z.center))
            throw ConfigError("zone " + std::to_string(z.index) + " extends outside bounds");
        for (const Segment& w : walls)
            if (point_segment_distance(z.center, w) <= z.radius)
                throw ConfigError("zone " + std::to_string(z.index) + " intersects a wall");
    }
    for (int i = 0; i < n_tiles(); ++i) {
        const Rect& t = tiles[i];
        if (t.width() <= 0 || t.height() <= 0) throw ConfigError("degenerate tile");
        if (t.xmin < bounds.xmin || t.xmax > bounds.xmax || t.ymin < bounds.ymin ||
            t.ymax > bounds.ymax)
            throw ConfigError("tile outside bounds");
        for (int j = i + 1; j < n_tiles(); ++j) {
            const Rect& u = tiles[j];
            const double ox = std::min(t.xmax, u.xmax) - std::max(t.xmin, u.xmin);
            const double oy = std::min(t.ymax, u.ymax) - std::max(t.ymin, u.ymin);
            if (ox > 0 && oy > 0) throw ConfigError("tiles overlap");
        }
    }
    for (const Zone& z : zones)
        if (tile_index(z.center) < 0) throw ConfigError("zone center outside free space");

    // Waypoint graph connectivity.
    const int n = static_cast<int>(waypoints.size());
    if (n == 0) throw ConfigError("no waypoints");
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int visited = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj_[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++visited;
                q.push(v);
            }
    }
    if (visited != n) throw ConfigError("waypoint graph is disconnected");

    for (auto [i, j] : waypoint_edges)
        if (!line_of_sight(waypoints[i], waypoints[j]))
            throw ConfigError("waypoint edge crosses a wall");
}

void FloorPlan::finalize() {
    build_navigation();
    validate();
}

// Approximation of the experiments' floor plan: an L-shaped corridor serving
// three rooms along the top and three labs on the right, six circular patrol
// zones, twelve observation tiles, 1 m door gaps.
FloorPlan FloorPlan::office_plan() {
    FloorPlan p;
    p.bounds = {0, 0, 30, 14};

    p.zones = {{{6, 9}, 1.0, 0},  {{13, 9}, 1.0, 1}, {{20, 9}, 1.0, 2},
               {{28, 4}, 1.0, 3}, {{28, 8}, 1.0, 4}, {{28, 12}, 1.0, 5}};

    p.tiles = {
        {0, 7, 8, 14},   {8, 7, 16, 14},  {16, 7, 24, 14},  // top rooms
        {26, 0, 30, 6},  {26, 6, 30, 10}, {26, 10, 30, 14},  // right labs
        {0, 5, 8, 7},    {8, 5, 16, 7},   {16, 5, 24, 7},    // corridor, horizontal leg
        {24, 0, 26, 5},  {24, 5, 26, 9},  {24, 9, 26, 14},   // corridor, vertical leg
    };

    auto wall = [&p](double x1, double y1, double x2, double y2) {
        p.walls.push_back({{x1, y1}, {x2, y2}});
    };
    // Outer boundary.
    wall(0, 0, 30, 0);
    wall(30, 0, 30, 14);
    wall(30, 14, 0, 14);
    wall(0, 14, 0, 0);
    // Top rooms off the corridor (doors at x = 4, 12, 20).
    wall(0, 7, 3.5, 7);
    wall(4.5, 7, 11.5, 7);
    wall(12.5, 7, 19.5, 7);
    wall(20.5, 7, 24, 7);
    wall(8, 7, 8, 14);
    wall(16, 7, 16, 14);
    // Corridor south wall; the area below it is outside free space.
    wall(0, 5, 24, 5);
    wall(24, 0, 24, 5);
    wall(24, 7, 24, 14);
    // Labs off the vertical corridor (doors at y = 4, 8, 12).
    wall(26, 0, 26, 3.5);
    wall(26, 4.5, 26, 7.5);
    wall(26, 8.5, 26, 11.5);
    wall(26, 12.5, 26, 14);
    wall(26, 6, 30, 6);
    wall(26, 10, 30, 10);

    // Waypoints 0..5 are the zone centers.
    p.waypoints = {
        {6, 9},  {13, 9}, {20, 9},                     // 0-2 zone centers, rooms
        {28, 4}, {28, 8}, {28, 12},                    // 3-5 zone centers, labs
        {4, 7},  {12, 7}, {20, 7},                     // 6-8 room door midpoints
        {4, 6},  {12, 6}, {20, 6},                     // 9-11 corridor below doors
        {25, 6},                                       // 12 corridor corner
        {25, 4}, {25, 8}, {25, 12},                    // 13-15 vertical corridor
        {26, 4}, {26, 8}, {26, 12},                    // 16-18 lab door midpoints
    };
    p.waypoint_edges = {
        {0, 6},   {1, 7},   {2, 8},           // zone - room door
        {6, 9},   {7, 10},  {8, 11},          // door - corridor
        {9, 10},  {10, 11}, {11, 12},         // along the corridor
        {12, 13}, {12, 14}, {14, 15},         // vertical leg
        {13, 16}, {14, 17}, {15, 18},         // beside lab doors
        {16, 3},  {17, 4},  {18, 5},          // lab door - zone
    };

    p.finalize();
    return p;
}

// Single open room with two zones; used by the learning smoke test.
FloorPlan FloorPlan::smoke_plan() {
    FloorPlan p;
    p.bounds = {0, 0, 10, 6};
    p.zones = {{{2, 3}, 1.0, 0}, {{8, 3}, 1.0, 1}};
    p.tiles = {{0, 0, 5, 6}, {5, 0, 10, 6}};
    p.walls = {{{0, 0}, {10, 0}}, {{10, 0}, {10, 6}}, {{10, 6}, {0, 6}}, {{0, 6}, {0, 0}}};
    p.waypoints = {{2, 3}, {8, 3}, {5, 3}};
    p.waypoint_edges = {{0, 2}, {2, 1}, {0, 1}};
    p.finalize();
    return p;
}

FloorPlan FloorPlan::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("geometry file is not valid JSON: ") + e.what());
    }
    try {
        FloorPlan p;
        const auto& b = j.at("bounds");
        p.bounds = {b.at(0), b.at(1), b.at(2), b.at(3)};
        for (const auto& w : j.at("walls"))
            p.walls.push_back({{w.at(0), w.at(1)}, {w.at(2), w.at(3)}});
        int idx = 0;
        for (const auto& z : j.at("zones")) {
            const auto& c = z.at("center");
            p.zones.push_back({{c.at(0), c.at(1)}, z.at("radius"), idx++});
        }
        for (const auto& t : j.at("tiles"))
            p.tiles.push_back({t.at(0), t.at(1), t.at(2), t.at(3)});
        for (const auto& w : j.at("waypoints")) p.waypoints.push_back({w.at(0), w.at(1)});
        for (const auto& e : j.at("waypoint_edges"))
            p.waypoint_edges.emplace_back(e.at(0), e.at(1));
        p.finalize();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad geometry schema: ") + e.what());
    }
}

FloorPlan FloorPlan::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open geometry file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string FloorPlan::to_json_text() const {
    nlohmann::json j;
    j["bounds"] = {bounds.xmin, bounds.ymin, bounds.xmax, bounds.ymax};
    j["walls"] = nlohmann::json::array();
    for (const Segment& w : walls) j["walls"].push_back({w.a.x, w.a.y, w.b.x, w.b.y});
    j["zones"] = nlohmann::json::array();
    for (const Zone& z : zones)
        j["zones"].push_back({{"center", {z.center.x, z.center.y}}, {"radius", z.radius}});
    j["tiles"] = nlohmann::json::array();
    for (const Rect& t : tiles) j["tiles"].push_back({t.xmin, t.ymin, t.xmax, t.ymax});
    j["waypoints"] = nlohmann::json::array();
    for (const Vec2& w : waypoints) j["waypoints"].push_back({w.x, w.y});
    j["waypoint_edges"] = nlohmann::json::array();
    for (auto [i, k] : waypoint_edges) j["waypoint_edges"].push_back({i, k});
    return j.dump(2);
}

}  // namespace patrol
