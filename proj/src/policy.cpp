#include "patrol/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "patrol/errors.hpp"

namespace patrol {

int PolicyParams::n_weights() const {
    return hidden * input_dim() + hidden + n_actions * hidden + n_actions;
}

PolicyParams PolicyParams::init(int n_tiles, int n_actions, int hidden, double lambda_max,
                                double weight_cap, RngStream& rng) {
    if (n_tiles < 1 || n_actions < 1 || hidden < 1)
        throw ConfigError("policy needs at least one tile, action and hidden unit");
    PolicyParams p;
    p.n_tiles = n_tiles;
    p.n_actions = n_actions;
    p.hidden = hidden;
    p.lambda_max = lambda_max;
    p.weight_cap = weight_cap;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(p.input_dim()));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    p.w1.resize(static_cast<std::size_t>(hidden) * p.input_dim());
    p.b1.assign(hidden, 0.0);
    p.w2.resize(static_cast<std::size_t>(n_actions) * hidden);
    p.b2.assign(n_actions, 0.0);
    for (double& w : p.w1) w = rng.uniform(-s1, s1);
    for (double& w : p.w2) w = rng.uniform(-s2, s2);
    return p;
}

PolicyGrad PolicyGrad::zeros(const PolicyParams& p) {
    PolicyGrad g;
    g.w1.assign(p.w1.size(), 0.0);
    g.b1.assign(p.b1.size(), 0.0);
    g.w2.assign(p.w2.size(), 0.0);
    g.b2.assign(p.b2.size(), 0.0);
    return g;
}

void PolicyGrad::axpy(double scale, const PolicyGrad& g) {
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] += scale * g.w1[i];
    for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += scale * g.b1[i];
    for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += scale * g.w2[i];
    for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += scale * g.b2[i];
}

namespace {

struct Forward {
    std::vector<double> input;       // one-hot tile + normalized multipliers
    std::vector<double> hidden_act;  // post-ReLU
    std::vector<double> probs;
};

Forward run_forward(const PolicyParams& p, const PolicyInput& in) {
    if (in.tile < 0 || in.tile >= p.n_tiles) throw UsageError("tile index out of range");
    if (static_cast<int>(in.multipliers.size()) != p.n_actions)
        throw UsageError("multiplier dimension does not match action count");
    Forward f;
    f.input.assign(p.input_dim(), 0.0);
    f.input[in.tile] = 1.0;
    // Simplex normalization: the policy's decision is scale-invariant in the
    // multipliers, so the network sees lambda / (1 + sum lambda); execution-
    // time multipliers of any magnitude land on the same input manifold the
    // training distribution covers.
    double lambda_sum = 0.0;
    for (int m = 0; m < p.n_actions; ++m) {
        if (in.multipliers[m] < 0) throw UsageError("multipliers must be nonnegative");
        lambda_sum += in.multipliers[m];
    }
    for (int m = 0; m < p.n_actions; ++m)
        f.input[p.n_tiles + m] = in.multipliers[m] / (1.0 + lambda_sum);

    f.hidden_act.assign(p.hidden, 0.0);
    const int d = p.input_dim();
    for (int h = 0; h < p.hidden; ++h) {
        double z = p.b1[h];
        const double* row = p.w1.data() + static_cast<std::size_t>(h) * d;
        for (int i = 0; i < d; ++i) z += row[i] * f.input[i];
        f.hidden_act[h] = z > 0.0 ? z : 0.0;
    }

    std::vector<double> logits(p.n_actions);
    for (int a = 0; a < p.n_actions; ++a) {
        double z = p.b2[a];
        const double* row = p.w2.data() + static_cast<std::size_t>(a) * p.hidden;
        for (int h = 0; h < p.hidden; ++h) z += row[h] * f.hidden_act[h];
        if (!std::isfinite(z)) throw NumericError("non-finite policy logit");
        logits[a] = z;
    }
    const double zmax = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    f.probs.resize(p.n_actions);
    for (int a = 0; a < p.n_actions; ++a) {
        f.probs[a] = std::exp(logits[a] - zmax);
        sum += f.probs[a];
    }
    for (double& q : f.probs) q /= sum;
    return f;
}

// Backprop of an arbitrary logit gradient through both layers.
PolicyGrad backprop_from_dlogits(const PolicyParams& params, const Forward& f,
                                 const std::vector<double>& dlogits) {
    PolicyGrad g = PolicyGrad::zeros(params);
    for (int a = 0; a < params.n_actions; ++a) {
        g.b2[a] = dlogits[a];
        double* row = g.w2.data() + static_cast<std::size_t>(a) * params.hidden;
        for (int h = 0; h < params.hidden; ++h) row[h] = dlogits[a] * f.hidden_act[h];
    }
    const int d = params.input_dim();
    for (int h = 0; h < params.hidden; ++h) {
        if (f.hidden_act[h] <= 0.0) continue;  // ReLU gate
        double dh = 0.0;
        for (int a = 0; a < params.n_actions; ++a)
            dh += params.w2[static_cast<std::size_t>(a) * params.hidden + h] * dlogits[a];
        g.b1[h] = dh;
        double* row = g.w1.data() + static_cast<std::size_t>(h) * d;
        for (int i = 0; i < d; ++i) row[i] = dh * f.input[i];
    }
    return g;
}

}  // namespace

std::vector<double> action_distribution(const PolicyParams& params, const PolicyInput& input) {
    return run_forward(params, input).probs;
}

PolicyGrad log_prob_grad(const PolicyParams& params, const PolicyInput& input, int action) {
    if (action < 0 || action >= params.n_actions) throw UsageError("action out of range");
    const Forward f = run_forward(params, input);
    // d log pi / d logits = onehot(action) - probs
    std::vector<double> dlogits(params.n_actions);
    for (int a = 0; a < params.n_actions; ++a)
        dlogits[a] = (a == action ? 1.0 : 0.0) - f.probs[a];
    return backprop_from_dlogits(params, f, dlogits);
}

int sample_action(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
        acc += probs[a];
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(probs.size()) - 1;
}

double weighted_reward(const RewardVector& r, const std::vector<double>& lambda,
                       const std::vector<double>& thresholds) {
    if (r.size() != static_cast<int>(lambda.size()) || lambda.size() != thresholds.size())
        throw UsageError("weighted reward dimension mismatch");
    double s = 0.0;
    for (int m = 0; m < r.size(); ++m) s += lambda[m] * (r[m] - thresholds[m]);
    return s;
}

void policy_gradient_step(PolicyParams& params, const std::vector<EpisodeTrace>& traces,
                          const std::vector<double>& thresholds, double learning_rate,
                          const std::vector<double>* occupancy_rates, double entropy_bonus) {
    if (traces.empty()) return;
    PolicyGrad total = PolicyGrad::zeros(params);
    for (const EpisodeTrace& trace : traces) {
        if (trace.params_revision != params.revision)
            throw UsageError("off-policy trace: parameters changed since the rollout");
        const int t0 = trace.length();
        std::vector<double> rl(t0);
        double mean = 0.0;
        for (int t = 0; t < t0; ++t) {
            rl[t] = weighted_reward(trace.rewards[t], trace.lambda, thresholds);
            mean += rl[t];
        }
        mean /= t0;
        if (occupancy_rates) {
            // Action-independent rate baseline; an empty vector selects the
            // plain (uncentered) reward-to-go, whose sign is anchored by the
            // thresholds inside the weighted reward itself.
            if (occupancy_rates->empty()) {
                mean = 0.0;
            } else {
                if (occupancy_rates->size() != trace.lambda.size())
                    throw UsageError("occupancy baseline dimension mismatch");
                mean = 0.0;
                for (std::size_t m = 0; m < trace.lambda.size(); ++m)
                    mean += trace.lambda[m] * ((*occupancy_rates)[m] - thresholds[m]);
            }
        }

        // Reward-to-go relative to the baseline rate, built backwards.
        double togo = 0.0;
        std::vector<double> advantage(t0);
        for (int t = t0 - 1; t >= 0; --t) {
            togo += rl[t] - mean;
            advantage[t] = togo;
        }
        for (int t = 0; t < t0; ++t) {
            if (advantage[t] == 0.0 && entropy_bonus == 0.0) continue;
            const Forward f = run_forward(params, {trace.tiles[t], trace.lambda});
            std::vector<double> dlogits(params.n_actions);
            double entropy = 0.0;
            if (entropy_bonus > 0.0)
                for (double q : f.probs) entropy -= q * std::log(q);
            for (int a = 0; a < params.n_actions; ++a) {
                const double score = (a == trace.actions[t] ? 1.0 : 0.0) - f.probs[a];
                dlogits[a] = advantage[t] * score;
                if (entropy_bonus > 0.0)
                    dlogits[a] -= entropy_bonus * f.probs[a] * (std::log(f.probs[a]) + entropy);
            }
            total.axpy(1.0 / t0, backprop_from_dlogits(params, f, dlogits));
        }
    }

    const double scale = learning_rate / traces.size();
    auto apply = [&](std::vector<double>& w, const std::vector<double>& g) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += scale * g[i];
            if (!std::isfinite(w[i])) throw NumericError("policy weights diverged");
            w[i] = std::clamp(w[i], -params.weight_cap, params.weight_cap);
        }
    };
    apply(params.w1, total.w1);
    apply(params.b1, total.b1);
    apply(params.w2, total.w2);
    apply(params.b2, total.b2);
    ++params.revision;
}

std::vector<std::vector<double>> route_cost_matrix(const std::vector<Vec2>& positions,
                                                   const FloorPlan& plan) {
    const int n = static_cast<int>(positions.size());
    const int m = plan.n_zones();
    std::vector<std::vector<double>> costs(n, std::vector<double>(m));
    for (int i = 0; i < n; ++i) {
        const auto visible = plan.visible_waypoints(positions[i]);
        if (visible.empty()) throw ConfigError("no waypoint visible from agent position");
        for (int z = 0; z < m; ++z) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [w, d] : visible)
                best = std::min(best, d + plan.waypoint_to_zone(w, z));
            costs[i][z] = best;
        }
    }
    return costs;
}

std::vector<Action> oracle_greedy_from_costs(const std::vector<double>& lambda,
                                             const std::vector<std::vector<double>>& costs) {
    const int n = static_cast<int>(costs.size());
    const int m = static_cast<int>(lambda.size());
    if (n > m) throw UsageError("oracle policy requires N <= M");

    // Top-N zones by multiplier, ties to the lower index.
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return lambda[a] > lambda[b]; });
    std::vector<int> targets(order.begin(), order.begin() + n);

    // Greedy nearest pair matching on route lengths.
    std::vector<Action> actions(n);
    std::vector<char> agent_done(n, 0), target_done(n, 0);
    for (int round = 0; round < n; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            if (agent_done[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (target_done[j]) continue;
                if (costs[i][targets[j]] < best) {
                    best = costs[i][targets[j]];
                    bi = i;
                    bj = j;
                }
            }
        }
        agent_done[bi] = 1;
        target_done[bj] = 1;
        actions[bi].target_zone = targets[bj];
    }
    return actions;
}

std::vector<Action> oracle_greedy_policy(const std::vector<double>& lambda,
                                         const std::vector<Vec2>& positions,
                                         const FloorPlan& plan) {
    if (static_cast<int>(lambda.size()) != plan.n_zones())
        throw UsageError("multiplier dimension does not match zone count");
    return oracle_greedy_from_costs(lambda, route_cost_matrix(positions, plan));
}

std::vector<double> sample_lambda_for_training(RngStream& rng, int m,
                                               const LambdaDistribution& dist) {
    std::vector<double> lambda(m, 0.0);
    switch (dist.mode) {
        case LambdaDistribution::Mode::PointMassZero:
            break;
        case LambdaDistribution::Mode::Uniform:
            for (double& v : lambda) v = rng.uniform(0.0, dist.lambda_max);
            break;
        case LambdaDistribution::Mode::Mixed:
            if (rng.uniform() < dist.sparse_fraction) {
                lambda[rng.uniform_int(static_cast<std::uint32_t>(m))] =
                    rng.uniform(0.0, dist.lambda_max);
            } else {
                for (double& v : lambda) v = rng.uniform(0.0, dist.lambda_max);
            }
            break;
    }
    return lambda;
}

std::string PolicyParams::to_json_text(std::uint64_t config_hash) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["n_tiles"] = n_tiles;
    j["n_actions"] = n_actions;
    j["hidden"] = hidden;
    j["lambda_max"] = lambda_max;
    j["weight_cap"] = weight_cap;
    j["revision"] = revision;
    j["config_hash"] = config_hash;
    j["w1"] = w1;
    j["b1"] = b1;
    j["w2"] = w2;
    j["b2"] = b2;
    return j.dump();
}

PolicyParams PolicyParams::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint is not valid JSON: ") + e.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1)
            throw ConfigError("unsupported checkpoint format version");
        PolicyParams p;
        p.n_tiles = j.at("n_tiles");
        p.n_actions = j.at("n_actions");
        p.hidden = j.at("hidden");
        p.lambda_max = j.at("lambda_max");
        p.weight_cap = j.at("weight_cap");
        p.revision = j.at("revision");
        p.w1 = j.at("w1").get<std::vector<double>>();
        p.b1 = j.at("b1").get<std::vector<double>>();
        p.w2 = j.at("w2").get<std::vector<double>>();
        p.b2 = j.at("b2").get<std::vector<double>>();
        const auto sz = [](std::size_t a, std::size_t b) { return a == b; };
        if (!sz(p.w1.size(), static_cast<std::size_t>(p.hidden) * p.input_dim()) ||
            !sz(p.b1.size(), p.hidden) ||
            !sz(p.w2.size(), static_cast<std::size_t>(p.n_actions) * p.hidden) ||
            !sz(p.b2.size(), p.n_actions))
            throw ConfigError("checkpoint layer shapes are inconsistent");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad checkpoint schema: ") + e.what());
    }
}

}  // namespace patrol
