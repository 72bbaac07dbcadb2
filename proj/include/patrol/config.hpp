#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "patrol/duals.hpp"
#include "patrol/floorplan.hpp"
#include "patrol/policy.hpp"

namespace patrol {

// Minimal TOML reader covering the experiment schema: comments, [tables],
// bare keys, strings, integers, floats, booleans, and (nested) arrays.
// Values are exposed under dotted keys ("experiment.alpha"). Anything
// outside this subset is an error, as is any key the schema does not know.
struct TomlValue {
    std::variant<bool, std::int64_t, double, std::string, std::vector<TomlValue>> data;

    bool is_array() const { return std::holds_alternative<std::vector<TomlValue>>(data); }
    double as_double() const;
    std::int64_t as_int() const;
    bool as_bool() const;
    const std::string& as_string() const;
    const std::vector<TomlValue>& as_array() const;
};

std::map<std::string, TomlValue> parse_toml(const std::string& text);

struct TrainingConfig {
    int solo_episodes = 2000;
    int block_episodes = 500;
    int passes = 2;
    int batch_size = 8;
    double learning_rate = 0.05;
    // Advantage baseline: "none" uses the plain reward-to-go (the
    // thresholds inside the weighted reward anchor its sign), "occupancy"
    // subtracts lambda'(rates - c) from a running per-zone occupancy
    // estimate, "episode_mean" subtracts the episode's own mean rate.
    std::string baseline = "none";
    // Entropy-gradient coefficient, annealed linearly from entropy_bonus to
    // entropy_bonus_final across the episodes of each phase; keeps the
    // softmax off its saturation rails while couplings form, then lets the
    // policy commit.
    double entropy_bonus = 5.0;
    double entropy_bonus_final = 0.5;
};

struct GraphConfig {
    std::string model = "proximity";    // "bernoulli" | "proximity"
    double p = 0.5;                     // bernoulli edge probability
    double disc = 5.0;                  // proximity disc size (meters)
    std::string footprint = "complete"; // bernoulli footprint: "complete" | "path"
};

struct PolicyConfig {
    int hidden = 256;
    double lambda_max = 10.0;
    double weight_cap = 50.0;
    double sparse_fraction = 0.6;
};

struct ExperimentConfig {
    int n_agents = 5;
    std::vector<double> thresholds;  // c, dimension M
    int t0 = 100;
    double alpha = 0.01;
    double eta = 0.5;
    double speed = 0.5;
    long horizon = 40000;
    std::vector<std::uint64_t> seeds = {1};
    bool allow_infeasible_thresholds = false;
    bool oracle = false;

    std::string geometry_file;      // empty: use the builtin plan
    std::string geometry_builtin = "office";

    GraphConfig graph;
    PolicyConfig policy;
    TrainingConfig training;

    std::vector<Vec2> spawn;  // empty: zone centers 0..N-1
    std::string output_dir = "out";

    int n_tasks() const { return static_cast<int>(thresholds.size()); }
    DualConfig dual_config() const { return {alpha, eta, t0, thresholds}; }

    FloorPlan load_plan() const;
    std::vector<Vec2> spawn_points(const FloorPlan& plan) const;

    // Validates ranges and the threshold feasibility conditions
    // (||c||_inf < 1 always; ||c||_1 <= N-1 unless overridden).
    void validate() const;

    std::uint64_t config_hash() const;

    static ExperimentConfig from_toml_file(const std::string& path);
    static ExperimentConfig from_toml_text(const std::string& text);
};

}  // namespace patrol
