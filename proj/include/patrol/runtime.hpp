#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patrol/config.hpp"
#include "patrol/duals.hpp"
#include "patrol/env.hpp"
#include "patrol/gossip.hpp"
#include "patrol/policy.hpp"

namespace patrol {

// Everything one execution run records. Running averages are kept as exact
// integer counts (average at t = counts[t][m] / (t+1)).
struct RunMetrics {
    long horizon = 0;
    int n_agents = 0;
    int n_zones = 0;
    int t0 = 0;
    std::uint64_t seed = 0;

    std::vector<std::vector<long>> cumulative_reward;     // horizon x M
    std::vector<std::vector<long>> occupancy;             // N x (bins_x*bins_y)
    int bins_x = 0, bins_y = 0;
    std::vector<std::vector<long>> comm_counts;           // N x N active-edge steps
    std::vector<std::vector<int>> neighborhood_sizes;     // horizon x N
    std::vector<std::vector<std::vector<double>>> local_multipliers;  // K x N x M
    std::vector<std::vector<double>> central_multipliers;             // K x M
    std::vector<double> divergence;                        // per k, max_n |.|_inf
    std::uint64_t gossip_payload_bits = 0;

    bool multiplier_bound_ok = true;
    double multiplier_bound_worst_ratio = 0.0;  // max ||lambda||_2 / bound observed

    double running_average(long t, int m) const {
        return static_cast<double>(cumulative_reward[t][m]) / static_cast<double>(t + 1);
    }
    std::vector<double> final_margins(const std::vector<double>& thresholds) const;
};

enum class PolicyMode { Trained, Oracle };

// One trained-mode decision, recorded only when requested: everything the
// agent's decision consumed, sufficient to replay the action exactly.
struct DecisionRecord {
    long t = 0;
    int agent = 0;
    int tile = 0;
    std::vector<double> lambda;
    int action = 0;
};

// Algorithm-2 execution over the stochastic graph: per timestep each agent
// observes its own tile, acts on (tile, local multipliers), gossips; at each
// rollout boundary the local multipliers take a distributed dual step. The
// per-agent decision path sees only (own tile, own multipliers, gossip bits);
// true rewards and positions feed the metrics and the centralized reference
// multipliers only. Oracle mode substitutes the scripted greedy assignment
// (which, as a centralized reference, reads all positions).
RunMetrics execute_online(const ExperimentConfig& cfg, const FloorPlan& plan,
                          const std::vector<PolicyParams>& params, PolicyMode mode,
                          std::uint64_t seed,
                          std::vector<DecisionRecord>* decision_trace = nullptr,
                          GossipSession::TraceSink gossip_trace = nullptr);

// Occupancy histogram over square bins of 0.25 m.
std::vector<std::vector<long>> collect_occupancy(const std::vector<std::vector<Vec2>>& trajectory,
                                                 const FloorPlan& plan, int* bins_x = nullptr,
                                                 int* bins_y = nullptr);

struct TrainingLogEntry {
    std::string phase;  // "solo" | "block"
    int active_agent = 0;
    int episode = 0;
    double mean_weighted_reward = 0.0;
    std::vector<double> lambda;
};

// Algorithm-1 offline training with the block-coordinate schedule: a solo
// agent learns shared parameters, every agent starts from that copy, then
// agents retrain round-robin while the others hold their policies fixed.
std::vector<PolicyParams> train_offline(const ExperimentConfig& cfg, const FloorPlan& plan,
                                        std::vector<TrainingLogEntry>* log = nullptr);

// Output files for one `run` invocation (envelopes across cfg.seeds; the
// per-run artifacts use the first seed).
void write_run_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                       const std::vector<RunMetrics>& per_seed);

struct SweepRow {
    double disc = 0.0;
    double min_margin = 0.0;
    double max_margin = 0.0;
};

std::vector<SweepRow> sweep_disc(const ExperimentConfig& cfg, const FloorPlan& plan,
                                 const std::vector<double>& discs,
                                 const std::vector<PolicyParams>& params, PolicyMode mode);

void write_margin_radius_csv(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace patrol
