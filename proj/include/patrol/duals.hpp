#pragma once

#include <vector>

#include "patrol/env.hpp"

namespace patrol {

// Nonnegative dual variables, one per zone. Started at zero they stay inside
// the ball of radius eta*sqrt(M)/alpha along every trajectory.
struct Multipliers {
    std::vector<double> values;
    long rollout_index = 0;

    static Multipliers zeros(int m) { return {std::vector<double>(m, 0.0), 0}; }

    double linf_norm() const;
    double l2_norm() const;
};

struct DualConfig {
    double alpha = 0.01;            // contraction, in (0,1)
    double eta = 0.5;               // dual step size
    int t0 = 100;                   // rollout length
    std::vector<double> thresholds; // c, per zone, max-norm < 1

    int n_tasks() const { return static_cast<int>(thresholds.size()); }
    void validate() const;  // throws ConfigError
};

// Contractive projected update from per-zone reward sums over one rollout:
//   lambda+ = [(1 - alpha) lambda + (eta/T0) (T0 c - sums)]_+
// Both the centralized and the distributed update evaluate exactly this
// expression, so perfect estimates reproduce the centralized result
// bit for bit.
Multipliers contractive_update(const Multipliers& lambda, const std::vector<double>& reward_sums,
                               const DualConfig& cfg);

// Centralized update from the true reward trace of one rollout (testing and
// reference dynamics).
Multipliers central_update(const Multipliers& lambda, const std::vector<RewardVector>& trace,
                           const DualConfig& cfg);

// Distributed update from the gossip estimate sums of the matching rollout.
Multipliers distributed_update(const Multipliers& lambda, const std::vector<double>& estimate_sums,
                               const DualConfig& cfg, long rollout_index);

// Almost-sure trajectory bound eta*sqrt(M)/alpha for runs started at zero.
double norm_bound(const DualConfig& cfg, int m);

}  // namespace patrol
