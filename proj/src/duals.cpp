#include "patrol/duals.hpp"

#include <cmath>
#include <string>

#include "patrol/errors.hpp"

namespace patrol {

double Multipliers::linf_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Multipliers::l2_norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

void DualConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
    if (t0 < 1) throw ConfigError("rollout length T0 must be >= 1");
    if (thresholds.empty()) throw ConfigError("thresholds must be nonempty");
    for (double c : thresholds)
        if (!(c >= 0.0 && c < 1.0))
            throw ConfigError("each threshold must lie in [0, 1)");
}

Multipliers contractive_update(const Multipliers& lambda, const std::vector<double>& reward_sums,
                               const DualConfig& cfg) {
    const int m = cfg.n_tasks();
    if (static_cast<int>(lambda.values.size()) != m ||
        static_cast<int>(reward_sums.size()) != m)
        throw UsageError("multiplier/threshold/sum dimensions disagree");
    Multipliers out;
    out.rollout_index = lambda.rollout_index + 1;
    out.values.resize(m);
    for (int i = 0; i < m; ++i) {
        const double raw = (1.0 - cfg.alpha) * lambda.values[i] +
                           (cfg.eta / cfg.t0) * (cfg.t0 * cfg.thresholds[i] - reward_sums[i]);
        out.values[i] = std::max(0.0, raw);
    }
    return out;
}

Multipliers central_update(const Multipliers& lambda, const std::vector<RewardVector>& trace,
                           const DualConfig& cfg) {
    if (static_cast<int>(trace.size()) != cfg.t0)
        throw UsageError("reward trace length " + std::to_string(trace.size()) +
                         " does not match T0 = " + std::to_string(cfg.t0));
    std::vector<double> sums(cfg.n_tasks(), 0.0);
    for (const RewardVector& r : trace) {
        if (r.size() != cfg.n_tasks()) throw UsageError("reward vector dimension mismatch");
        for (int m = 0; m < r.size(); ++m) sums[m] += r[m];
    }
    return contractive_update(lambda, sums, cfg);
}

Multipliers distributed_update(const Multipliers& lambda, const std::vector<double>& estimate_sums,
                               const DualConfig& cfg, long rollout_index) {
    if (rollout_index != lambda.rollout_index)
        throw UsageError("estimate sums from rollout " + std::to_string(rollout_index) +
                         " applied to multipliers at rollout " +
                         std::to_string(lambda.rollout_index));
    return contractive_update(lambda, estimate_sums, cfg);
}

double norm_bound(const DualConfig& cfg, int m) {
    return cfg.eta * std::sqrt(static_cast<double>(m)) / cfg.alpha;
}

}  // namespace patrol
