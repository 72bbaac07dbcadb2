#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patrol/comms.hpp"
#include "patrol/duals.hpp"

namespace patrol {

// Outcome of one numerical bound check. "holds" requires the empirical
// statistic to stay below bound + 3 standard errors; the verdict is a pure
// function of the stored numbers.
struct BoundReport {
    std::string claim;
    double bound = 0.0;
    double empirical = 0.0;
    long samples = 0;
    double std_error = 0.0;
    enum class Verdict { Holds, Violated, Inconclusive } verdict = Verdict::Inconclusive;
    std::string note;

    static Verdict judge(double empirical, double bound, double std_error) {
        return empirical <= bound + 3.0 * std_error ? Verdict::Holds : Verdict::Violated;
    }
};

std::string to_json_text(const std::vector<BoundReport>& reports);

// P(number of Bernoulli(p) trials needed for J successes <= i), by exact
// summation of the pmf. Convention: support starts at J, mean J/p.
double nbinom_cdf(int successes, double p, long trials);

// Mean J/p recovered by tail summation of the cdf (oracle for tests).
double nbinom_mean_by_tail(int successes, double p, double tol = 1e-12);

struct DisseminationResult {
    BoundReport expectation;                 // undelivered bits per rollout vs d_G/p
    std::vector<double> empirical_cdf;       // arrival lag CDF at far node
    std::vector<double> exact_cdf;           // negative-binomial law
    bool arrival_law_consistent = false;
    std::string detail;
};

// Monte Carlo check of the dissemination law: a source node observes a bit
// at every tau of a rollout; gossip runs over Bernoulli(p) samples of the
// footprint; statistics are collected at the node farthest from the source.
DisseminationResult verify_dissemination(const FootprintGraph& footprint, double p, long trials,
                                         int t0, std::uint64_t seed);

// Paired centralized/distributed dual dynamics on identical reward traces
// over a synthetic membership process; reports the worst per-agent mean of
// ||lambda_n - lambda||_inf against eta*d_G/(alpha*T0*p).
BoundReport verify_multiplier_error(const DualConfig& cfg, const FootprintGraph& footprint,
                                    double p, int n_seeds, int rollouts, std::uint64_t seed,
                                    double membership_prob = 0.2);

struct FeasibilityMargin {
    double delta = 0.0;       // (1 - ||c||_inf) - M (eps + beta)
    double alpha_min = 0.0;   // (eta d_G / (p T0)) * (M L / delta)
    double margin = 0.0;      // sqrt(alpha M)
    bool delta_positive = false;
    bool alpha_satisfies_bound = false;
};

FeasibilityMargin feasibility_margin(const DualConfig& cfg, int d_g, double p, double lipschitz,
                             double eps_plus_beta);

// Finite-horizon check of the multiplier running-average bound with 5%
// slack; violations at small K are inconclusive rather than failed.
BoundReport running_average_bound(const std::vector<std::vector<double>>& lambda_trajectory,
                                  const DualConfig& cfg);

}  // namespace patrol
