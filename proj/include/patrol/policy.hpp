#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patrol/env.hpp"
#include "patrol/rng.hpp"

namespace patrol {

// Two-layer perceptron policy over the augmented observation
// (tile one-hot, multipliers): input -> hidden (ReLU) -> M logits -> softmax.
// Multipliers enter the network simplex-normalized (lambda / (1 + sum
// lambda)): the greedy-optimal behavior is scale-invariant in them, and the
// transform keeps execution-time magnitudes on the trained input manifold.
// lambda_max is the training distribution's range, kept with the weights.
struct PolicyParams {
    int n_tiles = 0;
    int n_actions = 0;
    int hidden = 0;
    double lambda_max = 10.0;
    double weight_cap = 50.0;
    std::vector<double> w1;  // hidden x (n_tiles + n_actions), row-major
    std::vector<double> b1;
    std::vector<double> w2;  // n_actions x hidden, row-major
    std::vector<double> b2;
    std::uint64_t revision = 0;  // bumped on every gradient step

    int input_dim() const { return n_tiles + n_actions; }
    int n_weights() const;

    static PolicyParams init(int n_tiles, int n_actions, int hidden, double lambda_max,
                             double weight_cap, RngStream& rng);

    std::string to_json_text(std::uint64_t config_hash) const;
    static PolicyParams from_json_text(const std::string& text);
};

struct PolicyInput {
    int tile = 0;
    std::vector<double> multipliers;
};

// Gradient (or parameter delta) with the same shapes as PolicyParams.
struct PolicyGrad {
    std::vector<double> w1, b1, w2, b2;

    static PolicyGrad zeros(const PolicyParams& p);
    void axpy(double scale, const PolicyGrad& g);
};

// Softmax action probabilities; strictly positive, sums to one.
std::vector<double> action_distribution(const PolicyParams& params, const PolicyInput& input);

// Gradient of log pi(action | input) with respect to every weight.
PolicyGrad log_prob_grad(const PolicyParams& params, const PolicyInput& input, int action);

int sample_action(const std::vector<double>& probs, double u);

// lambda' (r - c)
double weighted_reward(const RewardVector& r, const std::vector<double>& lambda,
                       const std::vector<double>& thresholds);

// One agent's record of one on-policy episode.
struct EpisodeTrace {
    std::vector<int> tiles;                        // T0 observed tiles
    std::vector<int> actions;                      // T0 actions taken
    std::vector<RewardVector> rewards;             // T0 post-step global rewards
    std::vector<double> lambda;                    // fixed for the episode
    std::uint64_t params_revision = 0;

    int length() const { return static_cast<int>(actions.size()); }
};

// REINFORCE ascent step with a centered reward-to-go estimator. The
// advantage at t sums the weighted rewards from t on minus a baseline rate:
// by default the episode's own mean weighted reward; when `occupancy_rates`
// is given (a running cross-episode estimate of E[r] per zone), the rate is
// lambda' (rates - c) instead, which stays action-independent and therefore
// keeps the cross-episode zone-choice signal. Throws UsageError if any trace
// was generated under different parameters.
// `entropy_bonus` > 0 adds the entropy gradient of the action distribution
// to every step's update, holding the exploration floor open against
// softmax saturation.
void policy_gradient_step(PolicyParams& params, const std::vector<EpisodeTrace>& traces,
                          const std::vector<double>& thresholds, double learning_rate,
                          const std::vector<double>* occupancy_rates = nullptr,
                          double entropy_bonus = 0.0);

// Scripted reference policy: sends agents to the N zones with the largest
// multipliers (ties to the lower index), matching agents to zones greedily
// by route length.
std::vector<Action> oracle_greedy_policy(const std::vector<double>& lambda,
                                         const std::vector<Vec2>& positions,
                                         const FloorPlan& plan);

// Route lengths from every agent position to every zone center; one
// visibility scan per agent. Shared across the per-agent oracle calls of a
// timestep.
std::vector<std::vector<double>> route_cost_matrix(const std::vector<Vec2>& positions,
                                                   const FloorPlan& plan);

std::vector<Action> oracle_greedy_from_costs(const std::vector<double>& lambda,
                                             const std::vector<std::vector<double>>& costs);

struct LambdaDistribution {
    enum class Mode { PointMassZero, Uniform, Mixed };
    Mode mode = Mode::Mixed;
    double lambda_max = 10.0;
    double sparse_fraction = 0.1;  // Mixed: share of one-hot draws
};

std::vector<double> sample_lambda_for_training(RngStream& rng, int m,
                                               const LambdaDistribution& dist);

}  // namespace patrol
