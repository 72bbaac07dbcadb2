#include <doctest.h>

#include <cmath>

#include "patrol/analysis.hpp"
#include "patrol/errors.hpp"

using namespace patrol;

TEST_CASE("negative binomial cdf: trials-until-J-successes convention") {
    CHECK(nbinom_cdf(1, 0.5, 1) == doctest::Approx(0.5));
    CHECK(nbinom_cdf(2, 0.5, 2) == doctest::Approx(0.25));
    CHECK(nbinom_cdf(2, 0.5, 1) == 0.0);
    CHECK(nbinom_cdf(1, 1.0, 1) == doctest::Approx(1.0));
    CHECK(nbinom_cdf(3, 1.0, 2) == 0.0);

    // Exact pmf spot check: P(BN(2,0.5) = 3) = C(2,1) 0.25 * 0.5 = 0.25.
    CHECK(nbinom_cdf(2, 0.5, 3) - nbinom_cdf(2, 0.5, 2) == doctest::Approx(0.25));

    CHECK_THROWS_AS(nbinom_cdf(0, 0.5, 1), UsageError);
    CHECK_THROWS_AS(nbinom_cdf(1, 0.0, 1), UsageError);
    CHECK_THROWS_AS(nbinom_cdf(1, 1.5, 1), UsageError);
}

TEST_CASE("negative binomial cdf: monotonicity and tail-sum mean") {
    for (double p : {0.3, 0.5, 0.8})
        for (int j : {1, 2, 3}) {
            double prev = -1;
            for (long i = 0; i < 60; ++i) {
                const double c = nbinom_cdf(j, p, i);
                CHECK(c >= prev);
                CHECK(c <= 1.0);
                prev = c;
            }
            // Nonincreasing in the required successes.
            CHECK(nbinom_cdf(j, p, 10) >= nbinom_cdf(j + 1, p, 10));
            // Tail-sum mean equals J/p.
            CHECK(std::abs(nbinom_mean_by_tail(j, p) - j / p) < 1e-9);
        }
    CHECK(std::abs(nbinom_mean_by_tail(2, 0.5) - 4.0) < 1e-9);
}

TEST_CASE("dissemination verifier: complete graph at p=1 delivers in one step") {
    const auto res = verify_dissemination(FootprintGraph::complete(4), 1.0, 200, 20, 7);
    CHECK(res.expectation.verdict == BoundReport::Verdict::Holds);
    // d_G = 1, p = 1: everything but the final row arrives; exactly one
    // undelivered bit per rollout, bound d_G/p = 1.
    CHECK(res.expectation.empirical == doctest::Approx(1.0));
    CHECK(res.empirical_cdf[1] == doctest::Approx(1.0));
    CHECK(res.exact_cdf[1] == doctest::Approx(1.0));
    CHECK(res.arrival_law_consistent);
}

TEST_CASE("dissemination verifier: 2-hop path against the geometric convolution") {
    const auto res = verify_dissemination(FootprintGraph::path(3), 0.5, 20000, 40, 11);
    CHECK(res.expectation.verdict == BoundReport::Verdict::Holds);
    CHECK(res.expectation.bound == doctest::Approx(4.0));
    CHECK(res.arrival_law_consistent);
    // Exact law at lag 2: both edges active immediately: 0.25.
    CHECK(res.exact_cdf[2] == doctest::Approx(0.25));
    CHECK(std::abs(res.empirical_cdf[2] - 0.25) < 3 * std::sqrt(0.25 * 0.75 / 20000) + 1e-9);
}

TEST_CASE("dissemination monotonicity in p (spot check)") {
    const auto lo = verify_dissemination(FootprintGraph::path(3), 0.1, 2000, 30, 13);
    const auto hi = verify_dissemination(FootprintGraph::path(3), 0.8, 2000, 30, 13);
    CHECK(lo.empirical_cdf[10] < hi.empirical_cdf[10]);
    CHECK(lo.expectation.empirical > hi.expectation.empirical);
}

TEST_CASE("multiplier error verifier") {
    DualConfig cfg;
    cfg.alpha = 0.01;
    cfg.eta = 0.5;
    cfg.t0 = 100;
    cfg.thresholds = {0.2, 0.4, 0.6};

    SUBCASE("complete graph, p=1: bound eta/(alpha T0) = 0.5") {
        const auto rep =
            verify_multiplier_error(cfg, FootprintGraph::complete(3), 1.0, 2, 40, 5);
        CHECK(rep.bound == doctest::Approx(0.5));
        CHECK(rep.verdict == BoundReport::Verdict::Holds);
    }
    SUBCASE("3-node path, p=0.5: bound 2.0") {
        const auto rep = verify_multiplier_error(cfg, FootprintGraph::path(3), 0.5, 2, 40, 5);
        CHECK(rep.bound == doctest::Approx(2.0));
        CHECK(rep.verdict == BoundReport::Verdict::Holds);
    }
    SUBCASE("perfect estimates give zero error") {
        // p=1 on a complete graph with a single always-in-zone agent: the
        // only estimate error is the final row, so feeding the true sums
        // directly must give exactly zero.
        Multipliers a = Multipliers::zeros(3);
        Multipliers b = Multipliers::zeros(3);
        for (int k = 0; k < 10; ++k) {
            const std::vector<double> sums{50, 20, 80};
            a = distributed_update(a, sums, cfg, k);
            b = distributed_update(b, sums, cfg, k);
        }
        for (int z = 0; z < 3; ++z) CHECK(a.values[z] == b.values[z]);
    }
}

TEST_CASE("feasibility margin arithmetic") {
    DualConfig cfg;
    cfg.alpha = 0.01;
    cfg.eta = 0.5;
    cfg.t0 = 100;
    cfg.thresholds = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};

    SUBCASE("delta and margin at the experiment constants") {
        const FeasibilityMargin tm = feasibility_margin(cfg, 1, 1.0, 1.0, 0.05);
        CHECK(tm.delta == doctest::Approx(0.4 - 6 * 0.05));  // 0.1
        CHECK(tm.margin == doctest::Approx(std::sqrt(0.06)));
        CHECK(tm.delta_positive);
        // alpha_min = (0.5*1/(1*100)) * (6*1/0.1) = 0.005 * 60 = 0.3 > alpha.
        CHECK(tm.alpha_min == doctest::Approx(0.3));
        CHECK_FALSE(tm.alpha_satisfies_bound);
    }
    SUBCASE("degenerate delta flags") {
        DualConfig tight = cfg;
        tight.thresholds = {0.999};
        const FeasibilityMargin tm = feasibility_margin(tight, 1, 1.0, 1.0, 0.0);
        CHECK(tm.delta == doctest::Approx(0.001));
        tight.thresholds = {0.999};
        const FeasibilityMargin bad = feasibility_margin(tight, 1, 1.0, 1.0, 0.5);
        CHECK_FALSE(bad.delta_positive);
        CHECK(std::isinf(bad.alpha_min));
    }
}

TEST_CASE("prop4 running average report") {
    DualConfig cfg;
    cfg.alpha = 0.04;
    cfg.eta = 0.5;
    cfg.t0 = 10;
    cfg.thresholds = {0.5, 0.5};
    const double bound = cfg.eta * std::sqrt(2.0 / cfg.alpha);  // 3.53...

    SUBCASE("holds for small trajectories") {
        std::vector<std::vector<double>> traj(300, {0.1, 0.2});
        const auto rep = running_average_bound(traj, cfg);
        CHECK(rep.verdict == BoundReport::Verdict::Holds);
    }
    SUBCASE("violations at small K are inconclusive") {
        std::vector<std::vector<double>> traj(5, {bound * 2, 0.0});
        const auto rep = running_average_bound(traj, cfg);
        CHECK(rep.verdict == BoundReport::Verdict::Inconclusive);
    }
    SUBCASE("persistent violation at large K is flagged") {
        std::vector<std::vector<double>> traj(500, {bound * 2, 0.0});
        const auto rep = running_average_bound(traj, cfg);
        CHECK(rep.verdict == BoundReport::Verdict::Violated);
    }
}

TEST_CASE("bound reports serialize to JSON") {
    BoundReport r;
    r.claim = "test";
    r.bound = 1.0;
    r.empirical = 0.5;
    r.samples = 10;
    r.verdict = BoundReport::Verdict::Holds;
    const std::string text = to_json_text({r});
    CHECK(text.find("\"claim\"") != std::string::npos);
    CHECK(text.find("holds") != std::string::npos);
}

TEST_CASE("verdicts replay from the stored statistics") {
    const auto res = verify_dissemination(FootprintGraph::path(3), 0.5, 500, 30, 21);
    const BoundReport& r = res.expectation;
    CHECK(BoundReport::judge(r.empirical, r.bound, r.std_error) == r.verdict);
    CHECK(BoundReport::judge(2.0, 1.0, 0.1) == BoundReport::Verdict::Violated);
    CHECK(BoundReport::judge(1.2, 1.0, 0.1) == BoundReport::Verdict::Holds);
}
