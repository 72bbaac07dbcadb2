#include <doctest.h>

#include <cmath>

#include "patrol/duals.hpp"
#include "patrol/errors.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

namespace {

std::vector<RewardVector> constant_trace(int t0, std::vector<std::uint8_t> r) {
    return std::vector<RewardVector>(t0, RewardVector{std::move(r)});
}

}  // namespace

TEST_CASE("central update: fixed point, hand value, projection") {
    SUBCASE("average reward exactly c keeps lambda at zero") {
        const DualConfig cfg{0.01, 0.5, 2, {0.5}};
        std::vector<RewardVector> trace{{{1}}, {{0}}};  // average 0.5
        const Multipliers out = central_update(Multipliers::zeros(1), trace, cfg);
        CHECK(out.values[0] == 0.0);
    }
    SUBCASE("hand evaluation: 0.99 + 0.5*0.5 = 1.24") {
        const DualConfig cfg{0.01, 0.5, 100, {0.5}};
        Multipliers lam{{1.0}, 0};
        const Multipliers out = central_update(lam, constant_trace(100, {0}), cfg);
        CHECK(out.values[0] == doctest::Approx(1.24).epsilon(1e-12));
    }
    SUBCASE("projection clamps to zero") {
        const DualConfig cfg{0.01, 0.5, 100, {0.5}};
        Multipliers lam{{0.1}, 0};
        const Multipliers out = central_update(lam, constant_trace(100, {1}), cfg);
        CHECK(out.values[0] == 0.0);
    }
    SUBCASE("trace length mismatch") {
        const DualConfig cfg{0.01, 0.5, 100, {0.5}};
        CHECK_THROWS_AS(central_update(Multipliers::zeros(1), constant_trace(99, {0}), cfg),
                        UsageError);
    }
}

TEST_CASE("distributed update equals central update bit for bit on perfect estimates") {
    RngStream rng(51, "dual_exact");
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + static_cast<int>(rng.uniform_int(6));
        const int t0 = 1 + static_cast<int>(rng.uniform_int(50));
        DualConfig cfg;
        cfg.alpha = rng.uniform(0.001, 0.5);
        cfg.eta = rng.uniform(0.1, 2.0);
        cfg.t0 = t0;
        cfg.thresholds.clear();
        for (int z = 0; z < m; ++z) cfg.thresholds.push_back(rng.uniform(0.0, 0.99));

        Multipliers lam = Multipliers::zeros(m);
        for (int z = 0; z < m; ++z) lam.values[z] = rng.uniform(0.0, 3.0);

        std::vector<RewardVector> trace;
        std::vector<double> sums(m, 0.0);
        for (int t = 0; t < t0; ++t) {
            RewardVector r;
            for (int z = 0; z < m; ++z) r.values.push_back(rng.bernoulli(0.4) ? 1 : 0);
            for (int z = 0; z < m; ++z) sums[z] += r.values[z];
            trace.push_back(std::move(r));
        }
        const Multipliers central = central_update(lam, trace, cfg);
        const Multipliers dist = distributed_update(lam, sums, cfg, lam.rollout_index);
        for (int z = 0; z < m; ++z) {
            // Bitwise identity, not approximate equality.
            CHECK(central.values[z] == dist.values[z]);
        }
    }
}

TEST_CASE("underestimated rewards never shrink the multipliers below central") {
    const DualConfig cfg{0.05, 0.7, 10, {0.3, 0.6}};
    Multipliers lam{{0.4, 1.2}, 0};
    const std::vector<double> true_sums{7, 4};
    const std::vector<double> under{5, 2};
    const Multipliers central = distributed_update(lam, true_sums, cfg, 0);
    const Multipliers est = distributed_update(lam, under, cfg, 0);
    for (int z = 0; z < 2; ++z) CHECK(est.values[z] >= central.values[z]);
}

TEST_CASE("rollout mismatch is rejected") {
    const DualConfig cfg{0.01, 0.5, 4, {0.5}};
    Multipliers lam = Multipliers::zeros(1);
    lam.rollout_index = 3;
    CHECK_THROWS_AS(distributed_update(lam, {1.0}, cfg, 2), UsageError);
}

TEST_CASE("norm bound arithmetic") {
    CHECK(norm_bound({0.01, 0.5, 100, {0, 0, 0, 0, 0, 0}}, 6) ==
          doctest::Approx(122.47448).epsilon(1e-6));
    CHECK(norm_bound({0.999999999, 1.0, 1, {0}}, 1) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("boundedness and contraction along trajectories") {
    RngStream rng(53, "dual_bounds");
    const DualConfig cfg{0.02, 0.5, 20, {0.2, 0.5, 0.8}};
    const double cap = norm_bound(cfg, 3);

    SUBCASE("lambda stays within eta*sqrt(M)/alpha from zero start") {
        Multipliers lam = Multipliers::zeros(3);
        for (int k = 0; k < 2000; ++k) {
            std::vector<double> sums(3);
            for (auto& s : sums) s = std::floor(rng.uniform(0.0, cfg.t0 + 1));
            lam = distributed_update(lam, sums, cfg, k);
            CHECK(lam.l2_norm() <= cap);
        }
    }
    SUBCASE("rewards at or above c contract lambda to zero geometrically") {
        Multipliers lam{{3.0, 3.0, 3.0}, 0};
        std::vector<RewardVector> trace = constant_trace(cfg.t0, {1, 1, 1});
        double prev = lam.l2_norm();
        for (int k = 0; k < 50; ++k) {
            lam = central_update(lam, trace, cfg);
            CHECK(lam.l2_norm() <= (1.0 - cfg.alpha) * prev + 1e-12);
            prev = lam.l2_norm();
        }
        CHECK(prev < 3.0 * std::pow(1 - cfg.alpha, 50) * std::sqrt(3.0) + 1e-9);
    }
}

TEST_CASE("dual config validation") {
    CHECK_THROWS_AS((DualConfig{0.0, 0.5, 10, {0.5}}).validate(), ConfigError);
    CHECK_THROWS_AS((DualConfig{0.01, 0.5, 10, {1.0}}).validate(), ConfigError);
    CHECK_THROWS_AS((DualConfig{0.01, -0.5, 10, {0.5}}).validate(), ConfigError);
    CHECK_THROWS_AS((DualConfig{0.01, 0.5, 0, {0.5}}).validate(), ConfigError);
    CHECK_NOTHROW((DualConfig{0.01, 0.5, 10, {0.0, 0.99}}).validate());
}
