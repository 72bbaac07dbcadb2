#include "patrol/comms.hpp"

#include <queue>
#include <string>

#include "patrol/errors.hpp"
#include "patrol/rng.hpp"

namespace patrol {

FootprintGraph FootprintGraph::complete(int n) {
    FootprintGraph g;
    g.n_nodes = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
    return g;
}

FootprintGraph FootprintGraph::path(int n) {
    FootprintGraph g;
    g.n_nodes = n;
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    return g;
}

namespace {

std::vector<int> bfs_hops(const FootprintGraph& g, int source) {
    std::vector<std::vector<int>> adj(g.n_nodes);
    for (auto [a, b] : g.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> hops(g.n_nodes, -1);
    std::queue<int> q;
    hops[source] = 0;
    q.push(source);
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v : adj[u])
            if (hops[v] < 0) {
                hops[v] = hops[u] + 1;
                q.push(v);
            }
    }
    return hops;
}

}  // namespace

void FootprintGraph::validate() const {
    if (n_nodes <= 0) throw ConfigError("footprint graph needs at least one node");
    for (auto [a, b] : edges) {
        if (a == b) throw ConfigError("footprint graph has a self-loop");
        if (a < 0 || b < 0 || a >= n_nodes || b >= n_nodes)
            throw ConfigError("footprint edge endpoint out of range");
    }
    if (n_nodes > 1) {
        const auto hops = bfs_hops(*this, 0);
        for (int h : hops)
            if (h < 0) throw ConfigError("footprint graph is disconnected");
    }
}

int diameter(const FootprintGraph& g) {
    g.validate();
    int d = 0;
    for (int s = 0; s < g.n_nodes; ++s)
        for (int h : bfs_hops(g, s)) d = std::max(d, h);
    return d;
}

std::vector<int> neighbors(const GraphSample& sample, int n) {
    std::vector<int> out;
    for (auto [a, b] : sample.active_edges) {
        if (a == n) out.push_back(b);
        if (b == n) out.push_back(a);
    }
    return out;
}

GraphModel GraphModel::bernoulli(FootprintGraph g, double p, std::uint64_t seed) {
    if (p <= 0.0 || p > 1.0) throw ConfigError("Bernoulli edge probability must be in (0, 1]");
    g.validate();
    GraphModel m;
    m.variant = Variant::Bernoulli;
    m.footprint = std::move(g);
    m.p = p;
    m.seed = seed;
    return m;
}

GraphModel GraphModel::proximity(int n_agents, double disc, const FloorPlan& plan) {
    if (disc <= 0.0) throw ConfigError("proximity disc must be positive");
    GraphModel m;
    m.variant = Variant::Proximity;
    m.footprint = FootprintGraph::complete(n_agents);
    m.disc = disc;
    m.plan = &plan;
    return m;
}

GraphSample sample(const GraphModel& model, long t,
                   const std::optional<std::vector<Vec2>>& positions) {
    GraphSample s;
    s.time = t;
    if (model.variant == GraphModel::Variant::Bernoulli) {
        for (std::size_t e = 0; e < model.footprint.edges.size(); ++e) {
            const double u = keyed_uniform(model.seed, "graph", static_cast<std::uint64_t>(t), e);
            if (u < model.p) s.active_edges.push_back(model.footprint.edges[e]);
        }
    } else {
        if (!positions)
            throw UsageError("proximity graph model requires agent positions");
        if (static_cast<int>(positions->size()) != model.footprint.n_nodes)
            throw UsageError("positions size does not match agent count");
        for (auto [a, b] : model.footprint.edges) {
            const Vec2 pa = (*positions)[a];
            const Vec2 pb = (*positions)[b];
            if (distance(pa, pb) <= model.disc || model.plan->line_of_sight(pa, pb))
                s.active_edges.emplace_back(a, b);
        }
    }
    return s;
}

}  // namespace patrol
