#include "patrol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "patrol/errors.hpp"
#include "patrol/gossip.hpp"
#include "patrol/rng.hpp"

namespace patrol {

namespace {

const char* verdict_name(BoundReport::Verdict v) {
    switch (v) {
        case BoundReport::Verdict::Holds: return "holds";
        case BoundReport::Verdict::Violated: return "violated";
        default: return "inconclusive";
    }
}

}  // namespace

std::string to_json_text(const std::vector<BoundReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const BoundReport& r : reports) {
        arr.push_back({{"claim", r.claim},
                       {"bound", r.bound},
                       {"empirical", r.empirical},
                       {"samples", r.samples},
                       {"std_error", r.std_error},
                       {"verdict", verdict_name(r.verdict)},
                       {"note", r.note}});
    }
    return arr.dump(2);
}

double nbinom_cdf(int successes, double p, long trials) {
    if (successes < 1 || p <= 0.0 || p > 1.0 || trials < 0)
        throw UsageError("nbinom_cdf requires J >= 1, p in (0,1], trials >= 0");
    if (trials < successes) return 0.0;
    // pmf(j) = C(j-1, J-1) p^J (1-p)^(j-J), accumulated with the recurrence
    // pmf(j+1) = pmf(j) (1-p) j / (j+1-J).
    double pmf = std::pow(p, successes);
    double cdf = pmf;
    for (long j = successes; j < trials; ++j) {
        pmf *= (1.0 - p) * static_cast<double>(j) / static_cast<double>(j + 1 - successes);
        cdf += pmf;
    }
    return std::min(cdf, 1.0);
}

double nbinom_mean_by_tail(int successes, double p, double tol) {
    double mean = 0.0;
    for (long i = 0;; ++i) {
        const double tail = 1.0 - nbinom_cdf(successes, p, i);
        mean += tail;
        if (tail < tol && i > successes) break;
        if (i > 1000000) throw NumericError("nbinom tail summation failed to converge");
    }
    return mean;
}

DisseminationResult verify_dissemination(const FootprintGraph& footprint, double p, long trials,
                                         int t0, std::uint64_t seed) {
    footprint.validate();
    const int n = footprint.n_nodes;
    const int d_g = diameter(footprint);
    const int source = 0;

    // Farthest node from the source (for a path graph this is the other end,
    // at hop distance d_G).
    std::vector<std::vector<int>> adj(n);
    for (auto [a, b] : footprint.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> hops(n, -1);
    {
        std::vector<int> q{source};
        hops[source] = 0;
        for (std::size_t h = 0; h < q.size(); ++h)
            for (int v : adj[q[h]])
                if (hops[v] < 0) {
                    hops[v] = hops[q[h]] + 1;
                    q.push_back(v);
                }
    }
    const int far = static_cast<int>(std::max_element(hops.begin(), hops.end()) - hops.begin());
    const int far_hops = hops[far];

    std::vector<long> arrival_counts(t0, 0);  // arrival of row 0 within lag <= l
    double undelivered_sum = 0.0, undelivered_sq = 0.0;

    for (long trial = 0; trial < trials; ++trial) {
        GraphModel model = GraphModel::bernoulli(footprint, p, mix64(seed ^ (0x5D15ull + trial)));
        GossipSession session(n, t0, 1);
        session.start_rollout(0);
        long row0_arrival = -1;
        for (int t = 0; t < t0; ++t) {
            for (int agent = 0; agent < n; ++agent)
                session.observe(agent, t, {static_cast<std::uint8_t>(agent == source ? 1 : 0)});
            session.exchange(sample(model, t));
            if (row0_arrival < 0 && session.buffer(far).bit(0, 0)) row0_arrival = t;
        }
        if (row0_arrival >= 0)
            for (int l = static_cast<int>(row0_arrival); l < t0; ++l) ++arrival_counts[l];
        const double undelivered = t0 - session.finalize(far)[0];
        undelivered_sum += undelivered;
        undelivered_sq += undelivered * undelivered;
    }

    DisseminationResult res;
    const double mean = undelivered_sum / trials;
    const double var = std::max(0.0, undelivered_sq / trials - mean * mean);
    res.expectation.claim = "dissemination: undelivered bits per rollout <= d_G/p";
    res.expectation.bound = static_cast<double>(d_g) / p;
    res.expectation.empirical = mean;
    res.expectation.samples = trials;
    res.expectation.std_error = std::sqrt(var / trials);
    res.expectation.verdict =
        BoundReport::judge(res.expectation.empirical, res.expectation.bound,
                           res.expectation.std_error);

    res.empirical_cdf.resize(t0);
    res.exact_cdf.resize(t0);
    for (int l = 0; l < t0; ++l) {
        res.empirical_cdf[l] = static_cast<double>(arrival_counts[l]) / trials;
        res.exact_cdf[l] = far_hops >= 1 ? nbinom_cdf(far_hops, p, l) : 1.0;
    }

    // Consistency with the geometric-convolution law at representative lags
    // (the quartiles of the exact law), 3 sigma each.
    res.arrival_law_consistent = true;
    if (far_hops < 1) return res;
    for (double q : {0.25, 0.5, 0.75, 0.9}) {
        int l = far_hops;
        while (l < t0 - 1 && res.exact_cdf[l] < q) ++l;
        const double exact = res.exact_cdf[l];
        const double emp = res.empirical_cdf[l];
        const double se = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / trials);
        if (std::abs(emp - exact) > 3.0 * se) {
            res.arrival_law_consistent = false;
            res.detail += "lag " + std::to_string(l) + ": |" + std::to_string(emp) + " - " +
                          std::to_string(exact) + "| > 3se; ";
        }
    }
    return res;
}

BoundReport verify_multiplier_error(const DualConfig& cfg, const FootprintGraph& footprint,
                                    double p, int n_seeds, int rollouts, std::uint64_t seed,
                                    double membership_prob) {
    cfg.validate();
    footprint.validate();
    const int n = footprint.n_nodes;
    const int m = cfg.n_tasks();
    const int d_g = diameter(footprint);

    // Per-agent mean over rollouts and seeds of ||lambda_n - lambda||_inf.
    std::vector<double> agent_error_sum(n, 0.0);
    long count = 0;

    for (int s = 0; s < n_seeds; ++s) {
        RngStream member(mix64(seed ^ (0xD0D0ull + s)), "membership");
        GraphModel model = GraphModel::bernoulli(footprint, p, mix64(seed ^ (0x6A6Aull + s)));
        GossipSession session(n, cfg.t0, m);

        Multipliers central = Multipliers::zeros(m);
        std::vector<Multipliers> local(n, Multipliers::zeros(m));

        for (int k = 0; k < rollouts; ++k) {
            const long start = static_cast<long>(k) * cfg.t0;
            session.start_rollout(start);
            std::vector<double> true_sums(m, 0.0);
            for (int step = 0; step < cfg.t0; ++step) {
                const long t = start + step;
                // Synthetic membership: each agent is in each zone
                // independently with fixed probability.
                std::vector<std::uint8_t> any(m, 0);
                for (int agent = 0; agent < n; ++agent) {
                    std::vector<std::uint8_t> ind(m, 0);
                    for (int z = 0; z < m; ++z)
                        if (member.bernoulli(membership_prob)) ind[z] = 1;
                    for (int z = 0; z < m; ++z) any[z] |= ind[z];
                    session.observe(agent, t, ind);
                }
                session.exchange(sample(model, t));
                for (int z = 0; z < m; ++z) true_sums[z] += any[z];
            }
            central = contractive_update(central, true_sums, cfg);
            for (int agent = 0; agent < n; ++agent) {
                local[agent] = distributed_update(local[agent], session.finalize(agent), cfg, k);
                double err = 0.0;
                for (int z = 0; z < m; ++z)
                    err = std::max(err, std::abs(local[agent].values[z] - central.values[z]));
                agent_error_sum[agent] += err;
            }
            ++count;
        }
    }

    BoundReport rep;
    rep.claim = "multiplier error: E||lambda_n - lambda||_inf <= eta*d_G/(alpha*T0*p)";
    rep.bound = cfg.eta * d_g / (cfg.alpha * cfg.t0 * p);
    rep.empirical = 0.0;
    for (double s : agent_error_sum) rep.empirical = std::max(rep.empirical, s / count);
    rep.samples = count;
    rep.std_error = 0.0;  // expectation bound checked against a large-sample mean
    rep.verdict = BoundReport::judge(rep.empirical, rep.bound, rep.std_error);
    rep.note = "worst agent mean over " + std::to_string(n_seeds) + " seeds x " +
               std::to_string(rollouts) + " rollouts";
    return rep;
}

FeasibilityMargin feasibility_margin(const DualConfig& cfg, int d_g, double p, double lipschitz,
                             double eps_plus_beta) {
    const int m = cfg.n_tasks();
    double c_inf = 0.0;
    for (double c : cfg.thresholds) c_inf = std::max(c_inf, c);

    FeasibilityMargin tm;
    tm.delta = (1.0 - c_inf) - m * eps_plus_beta;
    tm.delta_positive = tm.delta > 0.0;
    tm.alpha_min = tm.delta_positive
                       ? (cfg.eta * d_g / (p * cfg.t0)) * (m * lipschitz / tm.delta)
                       : std::numeric_limits<double>::infinity();
    tm.margin = std::sqrt(cfg.alpha * m);
    tm.alpha_satisfies_bound = tm.delta_positive && cfg.alpha >= tm.alpha_min;
    return tm;
}

BoundReport running_average_bound(const std::vector<std::vector<double>>& lambda_trajectory,
                                  const DualConfig& cfg) {
    BoundReport rep;
    rep.claim = "multiplier running average <= eta*sqrt(M/alpha), 5% slack";
    const long k = static_cast<long>(lambda_trajectory.size());
    const int m = cfg.n_tasks();
    rep.bound = 1.05 * cfg.eta * std::sqrt(m / cfg.alpha);
    rep.samples = k;
    if (k == 0) {
        rep.verdict = BoundReport::Verdict::Inconclusive;
        rep.note = "empty trajectory";
        return rep;
    }
    std::vector<double> avg(m, 0.0);
    for (const auto& lam : lambda_trajectory)
        for (int z = 0; z < m; ++z) avg[z] += lam[z];
    rep.empirical = 0.0;
    for (int z = 0; z < m; ++z) rep.empirical = std::max(rep.empirical, avg[z] / k);
    if (rep.empirical <= rep.bound) {
        rep.verdict = BoundReport::Verdict::Holds;
    } else if (k < 200) {
        rep.verdict = BoundReport::Verdict::Inconclusive;
        rep.note = "asymptotic bound exceeded at small K = " + std::to_string(k);
    } else {
        rep.verdict = BoundReport::Verdict::Violated;
    }
    return rep;
}

}  // namespace patrol
