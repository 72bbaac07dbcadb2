#include "patrol/runtime.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "patrol/comms.hpp"
#include "patrol/errors.hpp"
#include "patrol/rng.hpp"

namespace patrol {

std::vector<double> RunMetrics::final_margins(const std::vector<double>& thresholds) const {
    std::vector<double> m(n_zones);
    for (int z = 0; z < n_zones; ++z)
        m[z] = running_average(horizon - 1, z) - thresholds[z];
    return m;
}

namespace {

constexpr double kBinSide = 0.25;

GraphModel make_graph_model(const ExperimentConfig& cfg, const FloorPlan& plan,
                            std::uint64_t seed) {
    if (cfg.graph.model == "proximity")
        return GraphModel::proximity(cfg.n_agents, cfg.graph.disc, plan);
    FootprintGraph g = cfg.graph.footprint == "path" ? FootprintGraph::path(cfg.n_agents)
                                                     : FootprintGraph::complete(cfg.n_agents);
    return GraphModel::bernoulli(std::move(g), cfg.graph.p, seed);
}

void bin_position(Vec2 p, const FloorPlan& plan, int bins_x, int bins_y, std::vector<long>& hist) {
    int bx = static_cast<int>((p.x - plan.bounds.xmin) / kBinSide);
    int by = static_cast<int>((p.y - plan.bounds.ymin) / kBinSide);
    bx = std::clamp(bx, 0, bins_x - 1);
    by = std::clamp(by, 0, bins_y - 1);
    hist[static_cast<std::size_t>(by) * bins_x + bx] += 1;
}

}  // namespace

RunMetrics execute_online(const ExperimentConfig& cfg, const FloorPlan& plan,
                          const std::vector<PolicyParams>& params, PolicyMode mode,
                          std::uint64_t seed,
                          std::vector<DecisionRecord>* decision_trace,
                          GossipSession::TraceSink gossip_trace) {
    const int n = cfg.n_agents;
    const int m = plan.n_zones();
    if (m != cfg.n_tasks())
        throw ConfigError("thresholds dimension does not match the number of zones");
    if (cfg.horizon % cfg.t0 != 0)
        throw ConfigError("horizon must be a multiple of the rollout length T0");
    if (mode == PolicyMode::Trained && static_cast<int>(params.size()) != n)
        throw UsageError("one parameter set per agent required");
    if (mode == PolicyMode::Oracle && n > m)
        throw ConfigError("oracle policy requires N <= M");
    const DualConfig dual = cfg.dual_config();

    RunMetrics out;
    out.horizon = cfg.horizon;
    out.n_agents = n;
    out.n_zones = m;
    out.t0 = cfg.t0;
    out.seed = seed;
    out.bins_x = static_cast<int>(std::lround(plan.bounds.width() / kBinSide));
    out.bins_y = static_cast<int>(std::lround(plan.bounds.height() / kBinSide));
    out.cumulative_reward.assign(cfg.horizon, std::vector<long>(m, 0));
    out.occupancy.assign(n, std::vector<long>(static_cast<std::size_t>(out.bins_x) * out.bins_y, 0));
    out.comm_counts.assign(n, std::vector<long>(n, 0));
    out.neighborhood_sizes.assign(cfg.horizon, std::vector<int>(n, 0));

    const GraphModel model = make_graph_model(cfg, plan, seed);
    GossipSession session(n, cfg.t0, m);
    if (gossip_trace) session.set_trace_sink(std::move(gossip_trace));

    JointState state{cfg.spawn_points(plan), 0};
    validate_state(state, plan);

    Multipliers central = Multipliers::zeros(m);
    std::vector<Multipliers> local(n, Multipliers::zeros(m));
    std::vector<long> rollout_true_sums(m, 0);
    std::vector<long> running(m, 0);
    const double lambda_cap = norm_bound(dual, m);

    for (long t = 0; t < cfg.horizon; ++t) {
        if (t % cfg.t0 == 0) {
            session.start_rollout(t);
            std::fill(rollout_true_sums.begin(), rollout_true_sums.end(), 0);
        }

        // Metrics from ground truth (never visible to the agents).
        const RewardVector r = reward(state, plan);
        for (int z = 0; z < m; ++z) {
            running[z] += r[z];
            out.cumulative_reward[t][z] = running[z];
            rollout_true_sums[z] += r[z];
        }
        for (int agent = 0; agent < n; ++agent)
            bin_position(state.positions[agent], plan, out.bins_x, out.bins_y,
                         out.occupancy[agent]);

        // Local observation, then one synchronous gossip round.
        for (int agent = 0; agent < n; ++agent)
            session.observe(agent, t, zone_indicator(state.positions[agent], plan));
        const GraphSample gs =
            sample(model, t,
                   model.variant == GraphModel::Variant::Proximity
                       ? std::optional<std::vector<Vec2>>(state.positions)
                       : std::nullopt);
        for (auto [a, b] : gs.active_edges) {
            out.comm_counts[a][b] += 1;
            out.comm_counts[b][a] += 1;
            out.neighborhood_sizes[t][a] += 1;
            out.neighborhood_sizes[t][b] += 1;
        }
        session.exchange(gs);

        // Decisions: each agent acts on (own tile, own multipliers) only.
        std::vector<Action> actions(n);
        if (mode == PolicyMode::Trained) {
            for (int agent = 0; agent < n; ++agent) {
                const int tile = observe_tile(state.positions[agent], plan);
                const auto probs =
                    action_distribution(params[agent], {tile, local[agent].values});
                actions[agent].target_zone = sample_action(
                    probs, keyed_uniform(seed, "action", static_cast<std::uint64_t>(agent),
                                         static_cast<std::uint64_t>(t)));
                if (decision_trace)
                    decision_trace->push_back(
                        {t, agent, tile, local[agent].values, actions[agent].target_zone});
            }
        } else {
            const auto costs = route_cost_matrix(state.positions, plan);
            for (int agent = 0; agent < n; ++agent)
                actions[agent] = oracle_greedy_from_costs(local[agent].values, costs)[agent];
        }
        state = step(state, actions, plan, cfg.speed);

        if ((t + 1) % cfg.t0 == 0) {
            const long k = t / cfg.t0;
            std::vector<double> true_sums(rollout_true_sums.begin(), rollout_true_sums.end());
            central = distributed_update(central, true_sums, dual, k);

            double div = 0.0;
            std::vector<std::vector<double>> snapshot;
            for (int agent = 0; agent < n; ++agent) {
                local[agent] =
                    distributed_update(local[agent], session.finalize(agent), dual, k);
                for (int z = 0; z < m; ++z)
                    div = std::max(div,
                                   std::abs(local[agent].values[z] - central.values[z]));
                snapshot.push_back(local[agent].values);

                const double ratio = local[agent].l2_norm() / lambda_cap;
                out.multiplier_bound_worst_ratio = std::max(out.multiplier_bound_worst_ratio, ratio);
                if (local[agent].l2_norm() > lambda_cap) out.multiplier_bound_ok = false;
            }
            const double central_ratio = central.l2_norm() / lambda_cap;
            out.multiplier_bound_worst_ratio = std::max(out.multiplier_bound_worst_ratio, central_ratio);
            if (central.l2_norm() > lambda_cap) out.multiplier_bound_ok = false;

            out.local_multipliers.push_back(std::move(snapshot));
            out.central_multipliers.push_back(central.values);
            out.divergence.push_back(div);
        }
    }
    out.gossip_payload_bits = session.total_payload_bits();
    return out;
}

std::vector<std::vector<long>> collect_occupancy(const std::vector<std::vector<Vec2>>& trajectory,
                                                 const FloorPlan& plan, int* bins_x_out,
                                                 int* bins_y_out) {
    const int bins_x = static_cast<int>(std::lround(plan.bounds.width() / kBinSide));
    const int bins_y = static_cast<int>(std::lround(plan.bounds.height() / kBinSide));
    if (bins_x_out) *bins_x_out = bins_x;
    if (bins_y_out) *bins_y_out = bins_y;
    if (trajectory.empty()) return {};
    const int n = static_cast<int>(trajectory.front().size());
    std::vector<std::vector<long>> hist(
        n, std::vector<long>(static_cast<std::size_t>(bins_x) * bins_y, 0));
    for (const auto& positions : trajectory)
        for (int agent = 0; agent < n; ++agent)
            bin_position(positions[agent], plan, bins_x, bins_y, hist[agent]);
    return hist;
}

namespace {

// One training episode; returns the active agent's trace.
EpisodeTrace run_episode(const FloorPlan& plan, const std::vector<PolicyParams*>& agents,
                         int active, const std::vector<double>& lambda, int t0, double speed,
                         RngStream& spawn_rng, RngStream& action_rng) {
    const int n = static_cast<int>(agents.size());
    JointState state;
    state.time = 0;
    for (int i = 0; i < n; ++i) state.positions.push_back(sample_free_position(plan, spawn_rng));

    EpisodeTrace trace;
    trace.lambda = lambda;
    trace.params_revision = agents[active]->revision;
    for (int t = 0; t < t0; ++t) {
        std::vector<Action> actions(n);
        int active_tile = 0;
        for (int i = 0; i < n; ++i) {
            const int tile = observe_tile(state.positions[i], plan);
            const auto probs = action_distribution(*agents[i], {tile, lambda});
            actions[i].target_zone = sample_action(probs, action_rng.uniform());
            if (i == active) active_tile = tile;
        }
        state = step(state, actions, plan, speed);
        trace.tiles.push_back(active_tile);
        trace.actions.push_back(actions[active].target_zone);
        trace.rewards.push_back(reward(state, plan));
    }
    return trace;
}

double trace_return(const EpisodeTrace& trace, const std::vector<double>& thresholds) {
    double s = 0.0;
    for (const RewardVector& r : trace.rewards)
        s += weighted_reward(r, trace.lambda, thresholds);
    return s / trace.length();
}

}  // namespace

std::vector<PolicyParams> train_offline(const ExperimentConfig& cfg, const FloorPlan& plan,
                                        std::vector<TrainingLogEntry>* log) {
    const int n = cfg.n_agents;
    const int m = plan.n_zones();
    if (m != cfg.n_tasks())
        throw ConfigError("thresholds dimension does not match the number of zones");
    const std::uint64_t seed = cfg.seeds.front();

    RngStream init_rng(seed, "policy_init");
    PolicyParams shared = PolicyParams::init(plan.n_tiles(), m, cfg.policy.hidden,
                                             cfg.policy.lambda_max, cfg.policy.weight_cap,
                                             init_rng);

    RngStream lambda_rng(seed, "train_lambda");
    RngStream spawn_rng(seed, "train_spawn");
    RngStream action_rng(seed, "train_action");
    const LambdaDistribution dist{LambdaDistribution::Mode::Mixed, cfg.policy.lambda_max,
                                  cfg.policy.sparse_fraction};
    const double lr = cfg.training.learning_rate;
    const bool occupancy_baseline = cfg.training.baseline == "occupancy";
    const bool no_baseline = cfg.training.baseline == "none";
    const std::vector<double> empty_rates;

    // Running per-zone estimate of E[r], refreshed after every episode; the
    // action-independent baseline for the advantage. Starts at zero so the
    // cold-start policy (which rarely enters a zone) sees neutral advantages
    // instead of a uniform penalty.
    std::vector<double> rates(m, 0.0);
    constexpr double kRateEma = 0.05;

    auto train_block = [&](std::vector<PolicyParams*> agents, int active, int episodes,
                           const std::string& phase) {
        std::vector<EpisodeTrace> batch;
        for (int ep = 0; ep < episodes; ++ep) {
            const double progress = episodes > 1 ? static_cast<double>(ep) / (episodes - 1) : 1.0;
            const double entropy = cfg.training.entropy_bonus +
                                   progress * (cfg.training.entropy_bonus_final -
                                               cfg.training.entropy_bonus);
            const auto lambda = sample_lambda_for_training(lambda_rng, m, dist);
            EpisodeTrace trace = run_episode(plan, agents, active, lambda, cfg.t0, cfg.speed,
                                             spawn_rng, action_rng);
            if (log)
                log->push_back({phase, active, ep, trace_return(trace, cfg.thresholds), lambda});
            const std::vector<double> step_rates = rates;
            for (int z = 0; z < m; ++z) {
                double zone_mean = 0.0;
                for (const RewardVector& r : trace.rewards) zone_mean += r[z];
                rates[z] += kRateEma * (zone_mean / trace.length() - rates[z]);
            }
            batch.push_back(std::move(trace));
            if (static_cast<int>(batch.size()) >= cfg.training.batch_size) {
                const std::vector<double>* baseline =
                    no_baseline ? &empty_rates : occupancy_baseline ? &step_rates : nullptr;
                policy_gradient_step(*agents[active], batch, cfg.thresholds, lr, baseline,
                                     entropy);
                batch.clear();
            }
        }
    };

    // Solo phase: a single agent learns the shared parameters.
    train_block({&shared}, 0, cfg.training.solo_episodes, "solo");

    // Every agent starts from the shared parameters, then retrains in
    // round-robin while the others stay fixed.
    std::vector<PolicyParams> params(n, shared);
    std::vector<PolicyParams*> all;
    for (PolicyParams& p : params) all.push_back(&p);
    for (int pass = 0; pass < cfg.training.passes; ++pass)
        for (int active = 0; active < n; ++active)
            train_block(all, active, cfg.training.block_episodes, "block");
    return params;
}

std::vector<SweepRow> sweep_disc(const ExperimentConfig& cfg, const FloorPlan& plan,
                                 const std::vector<double>& discs,
                                 const std::vector<PolicyParams>& params, PolicyMode mode) {
    if (cfg.graph.model != "proximity")
        throw ConfigError("sweep-disc requires the proximity graph model");

    // Runs share no mutable state; fan the (disc, seed) grid out across
    // workers and merge by slot so the result does not depend on schedule.
    const std::size_t n_seeds = cfg.seeds.size();
    std::vector<double> worst(discs.size() * n_seeds);
    std::vector<std::future<void>> tasks;
    const std::size_t workers =
        std::max<std::size_t>(1, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < std::min(workers, worst.size()); ++w) {
        tasks.push_back(std::async(std::launch::async, [&]() {
            for (std::size_t job = next.fetch_add(1); job < worst.size();
                 job = next.fetch_add(1)) {
                ExperimentConfig c = cfg;
                c.graph.disc = discs[job / n_seeds];
                const RunMetrics run =
                    execute_online(c, plan, params, mode, cfg.seeds[job % n_seeds]);
                const auto margins = run.final_margins(cfg.thresholds);
                worst[job] = *std::min_element(margins.begin(), margins.end());
            }
        }));
    }
    for (auto& t : tasks) t.get();

    std::vector<SweepRow> rows;
    for (std::size_t d = 0; d < discs.size(); ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < n_seeds; ++s) {
            lo = std::min(lo, worst[d * n_seeds + s]);
            hi = std::max(hi, worst[d * n_seeds + s]);
        }
        rows.push_back({discs[d], lo, hi});
    }
    return rows;
}

}  // namespace patrol
