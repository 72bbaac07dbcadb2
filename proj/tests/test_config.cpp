#include <doctest.h>

#include "patrol/config.hpp"
#include "patrol/errors.hpp"

using namespace patrol;

namespace {

const char* kBaseConfig = R"(
schema_version = 1

[experiment]
agents = 5
thresholds = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]
rollout_length = 100
alpha = 0.01
eta = 0.5
speed = 0.5
horizon = 40000
seeds = [1, 2, 3, 4, 5]

[graph]
model = "proximity"
disc = 5.0
)";

}  // namespace

TEST_CASE("toml subset parser") {
    const auto kv = parse_toml(R"(
# comment
top = 3
[table]
name = "hello"   # trailing comment
ratio = 0.25
flag = true
list = [1, 2, 3]
nested = [[1.5, 2.5], [3.5, 4.5]]
)");
    CHECK(kv.at("top").as_int() == 3);
    CHECK(kv.at("table.name").as_string() == "hello");
    CHECK(kv.at("table.ratio").as_double() == doctest::Approx(0.25));
    CHECK(kv.at("table.flag").as_bool());
    CHECK(kv.at("table.list").as_array().size() == 3);
    CHECK(kv.at("table.nested").as_array()[1].as_array()[0].as_double() ==
          doctest::Approx(3.5));

    CHECK_THROWS_AS(parse_toml("key 3"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = 1\na = 2"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = \"unterminated"), ConfigError);
    CHECK_THROWS_AS(parse_toml("a = [1, 2"), ConfigError);
}

TEST_CASE("experiment config: parse, defaults, round trip to plan") {
    const ExperimentConfig cfg = ExperimentConfig::from_toml_text(kBaseConfig);
    CHECK(cfg.n_agents == 5);
    CHECK(cfg.n_tasks() == 6);
    CHECK(cfg.t0 == 100);
    CHECK(cfg.seeds.size() == 5);
    CHECK(cfg.graph.model == "proximity");
    CHECK(cfg.policy.hidden == 256);  // default

    const FloorPlan plan = cfg.load_plan();
    CHECK(plan.n_zones() == 6);
    const auto spawn = cfg.spawn_points(plan);
    CHECK(spawn.size() == 5);
}

TEST_CASE("unknown keys are rejected") {
    std::string text = kBaseConfig;
    text += "\n[experiment]\n";  // duplicate table header is fine, keys merge
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text(text + "alpa = 0.1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text(std::string(kBaseConfig) +
                                                     "\n[typo_table]\nx = 1\n"),
                    ConfigError);
}

TEST_CASE("schema validation errors") {
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text("schema_version = 2\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text("schema_version = 1\n"), ConfigError);

    // ||c||_inf must stay below one.
    std::string bad = R"(
schema_version = 1
[experiment]
agents = 3
thresholds = [1.0, 0.2]
)";
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text(bad), ConfigError);

    // ||c||_1 > N-1 requires the override flag.
    std::string infeasible = R"(
schema_version = 1
[experiment]
agents = 1
thresholds = [0.4, 0.4]
)";
    CHECK_THROWS_AS(ExperimentConfig::from_toml_text(infeasible), ConfigError);
    CHECK_NOTHROW(ExperimentConfig::from_toml_text(
        infeasible + "allow_infeasible_thresholds = true\n"));
}

TEST_CASE("missing geometry file names the path") {
    std::string text = kBaseConfig;
    text += "\n[geometry]\nfile = \"/nonexistent/geo.json\"\n";
    const ExperimentConfig cfg = ExperimentConfig::from_toml_text(text);
    try {
        cfg.load_plan();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/geo.json") != std::string::npos);
    }
}

TEST_CASE("config hash is stable and sensitive") {
    const ExperimentConfig a = ExperimentConfig::from_toml_text(kBaseConfig);
    const ExperimentConfig b = ExperimentConfig::from_toml_text(kBaseConfig);
    CHECK(a.config_hash() == b.config_hash());
    ExperimentConfig c = a;
    c.alpha = 0.02;
    CHECK(c.config_hash() != a.config_hash());
}
