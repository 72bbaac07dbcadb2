#include "patrol/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "patrol/errors.hpp"
#include "patrol/rng.hpp"

namespace patrol {

double TomlValue::as_double() const {
    if (std::holds_alternative<double>(data)) return std::get<double>(data);
    if (std::holds_alternative<std::int64_t>(data))
        return static_cast<double>(std::get<std::int64_t>(data));
    throw ConfigError("expected a number");
}

std::int64_t TomlValue::as_int() const {
    if (std::holds_alternative<std::int64_t>(data)) return std::get<std::int64_t>(data);
    throw ConfigError("expected an integer");
}

bool TomlValue::as_bool() const {
    if (std::holds_alternative<bool>(data)) return std::get<bool>(data);
    throw ConfigError("expected a boolean");
}

const std::string& TomlValue::as_string() const {
    if (std::holds_alternative<std::string>(data)) return std::get<std::string>(data);
    throw ConfigError("expected a string");
}

const std::vector<TomlValue>& TomlValue::as_array() const {
    if (is_array()) return std::get<std::vector<TomlValue>>(data);
    throw ConfigError("expected an array");
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("config line " + std::to_string(line) + ": " + msg);
    }
    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_inline() {
        while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
    }
};

TomlValue parse_value(Cursor& c);

TomlValue parse_scalar_token(Cursor& c, const std::string& tok) {
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    // Integer or float.
    bool looks_float = false;
    for (char ch : tok)
        if (ch == '.' || ch == 'e' || ch == 'E') looks_float = true;
    try {
        std::size_t used = 0;
        if (!looks_float) {
            const std::int64_t v = std::stoll(tok, &used);
            if (used == tok.size()) return {v};
        }
        const double d = std::stod(tok, &used);
        if (used == tok.size()) return {d};
    } catch (...) {
    }
    c.fail("cannot parse value '" + tok + "'");
}

TomlValue parse_value(Cursor& c) {
    c.skip_ws_inline();
    if (c.done()) c.fail("missing value");
    const char first = c.peek();
    if (first == '"') {
        c.take();
        std::string s;
        while (!c.done() && c.peek() != '"') {
            char ch = c.take();
            if (ch == '\\' && !c.done()) {
                const char esc = c.take();
                switch (esc) {
                    case 'n': ch = '\n'; break;
                    case 't': ch = '\t'; break;
                    case '"': ch = '"'; break;
                    case '\\': ch = '\\'; break;
                    default: c.fail("unsupported escape");
                }
            }
            if (ch == '\n') c.fail("unterminated string");
            s.push_back(ch);
        }
        if (c.done()) c.fail("unterminated string");
        c.take();  // closing quote
        return {s};
    }
    if (first == '[') {
        c.take();
        std::vector<TomlValue> items;
        for (;;) {
            c.skip_ws_inline();
            while (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) {
                c.take();
                c.skip_ws_inline();
            }
            if (c.done()) c.fail("unterminated array");
            if (c.peek() == ']') {
                c.take();
                break;
            }
            items.push_back(parse_value(c));
            c.skip_ws_inline();
            while (!c.done() && (c.peek() == '\n' || c.peek() == '\r')) {
                c.take();
                c.skip_ws_inline();
            }
            if (c.done()) c.fail("unterminated array");
            if (c.peek() == ',') {
                c.take();
            } else if (c.peek() != ']') {
                c.fail("expected ',' or ']' in array");
            }
        }
        return {items};
    }
    std::string tok;
    while (!c.done()) {
        const char ch = c.peek();
        if (ch == '\n' || ch == '\r' || ch == ' ' || ch == '\t' || ch == ',' || ch == ']' ||
            ch == '#')
            break;
        tok.push_back(c.take());
    }
    if (tok.empty()) c.fail("missing value");
    return parse_scalar_token(c, tok);
}

bool valid_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

}  // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    Cursor c{text};
    std::string table;
    while (!c.done()) {
        c.skip_ws_inline();
        if (c.done()) break;
        const char first = c.peek();
        if (first == '\n' || first == '\r') {
            c.take();
            continue;
        }
        if (first == '#') {
            while (!c.done() && c.peek() != '\n') c.take();
            continue;
        }
        if (first == '[') {
            c.take();
            std::string name;
            while (!c.done() && c.peek() != ']') {
                const char ch = c.take();
                if (!valid_key_char(ch)) c.fail("bad table name");
                name.push_back(ch);
            }
            if (c.done() || name.empty()) c.fail("bad table header");
            c.take();  // ']'
            table = name;
            c.skip_ws_inline();
            if (!c.done() && c.peek() == '#')
                while (!c.done() && c.peek() != '\n') c.take();
            continue;
        }
        std::string key;
        while (!c.done() && valid_key_char(c.peek())) key.push_back(c.take());
        if (key.empty()) c.fail("expected a key");
        c.skip_ws_inline();
        if (c.done() || c.peek() != '=') c.fail("expected '=' after key '" + key + "'");
        c.take();
        TomlValue v = parse_value(c);
        c.skip_ws_inline();
        if (!c.done() && c.peek() == '#')
            while (!c.done() && c.peek() != '\n') c.take();
        if (!c.done() && c.peek() != '\n' && c.peek() != '\r')
            c.fail("trailing characters after value for key '" + key + "'");
        const std::string full = table.empty() ? key : table + "." + key;
        if (out.count(full)) c.fail("duplicate key '" + full + "'");
        out.emplace(full, std::move(v));
    }
    return out;
}

namespace {

class Schema {
public:
    explicit Schema(std::map<std::string, TomlValue> kv) : kv_(std::move(kv)) {}

    bool has(const std::string& key) {
        seen_.insert(key);
        return kv_.count(key) > 0;
    }
    const TomlValue& at(const std::string& key) {
        seen_.insert(key);
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw ConfigError("missing required config key '" + key + "'");
        return it->second;
    }
    template <typename T, typename F>
    void opt(const std::string& key, T& dst, F conv) {
        if (has(key)) dst = conv(kv_.at(key));
    }

    void reject_unknown() const {
        for (const auto& [key, _] : kv_)
            if (!seen_.count(key))
                throw ConfigError("unknown config key '" + key + "'");
    }

private:
    std::map<std::string, TomlValue> kv_;
    std::set<std::string> seen_;
};

std::vector<double> to_double_vec(const TomlValue& v) {
    std::vector<double> out;
    for (const TomlValue& e : v.as_array()) out.push_back(e.as_double());
    return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_toml_text(const std::string& text) {
    Schema s(parse_toml(text));
    if (s.at("schema_version").as_int() != 1)
        throw ConfigError("unsupported schema_version (expected 1)");

    ExperimentConfig cfg;
    cfg.n_agents = static_cast<int>(s.at("experiment.agents").as_int());
    cfg.thresholds = to_double_vec(s.at("experiment.thresholds"));
    s.opt("experiment.rollout_length", cfg.t0,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("experiment.alpha", cfg.alpha, [](const TomlValue& v) { return v.as_double(); });
    s.opt("experiment.eta", cfg.eta, [](const TomlValue& v) { return v.as_double(); });
    s.opt("experiment.speed", cfg.speed, [](const TomlValue& v) { return v.as_double(); });
    s.opt("experiment.horizon", cfg.horizon,
          [](const TomlValue& v) { return static_cast<long>(v.as_int()); });
    s.opt("experiment.allow_infeasible_thresholds", cfg.allow_infeasible_thresholds,
          [](const TomlValue& v) { return v.as_bool(); });
    s.opt("experiment.oracle", cfg.oracle, [](const TomlValue& v) { return v.as_bool(); });
    s.opt("experiment.output_dir", cfg.output_dir,
          [](const TomlValue& v) { return v.as_string(); });
    if (s.has("experiment.seeds")) {
        cfg.seeds.clear();
        for (const TomlValue& e : s.at("experiment.seeds").as_array())
            cfg.seeds.push_back(static_cast<std::uint64_t>(e.as_int()));
    }

    s.opt("geometry.file", cfg.geometry_file, [](const TomlValue& v) { return v.as_string(); });
    s.opt("geometry.builtin", cfg.geometry_builtin,
          [](const TomlValue& v) { return v.as_string(); });

    s.opt("graph.model", cfg.graph.model, [](const TomlValue& v) { return v.as_string(); });
    s.opt("graph.p", cfg.graph.p, [](const TomlValue& v) { return v.as_double(); });
    s.opt("graph.disc", cfg.graph.disc, [](const TomlValue& v) { return v.as_double(); });
    s.opt("graph.footprint", cfg.graph.footprint,
          [](const TomlValue& v) { return v.as_string(); });

    s.opt("policy.hidden", cfg.policy.hidden,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("policy.lambda_max", cfg.policy.lambda_max,
          [](const TomlValue& v) { return v.as_double(); });
    s.opt("policy.weight_cap", cfg.policy.weight_cap,
          [](const TomlValue& v) { return v.as_double(); });
    s.opt("policy.sparse_fraction", cfg.policy.sparse_fraction,
          [](const TomlValue& v) { return v.as_double(); });

    s.opt("training.solo_episodes", cfg.training.solo_episodes,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("training.block_episodes", cfg.training.block_episodes,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("training.passes", cfg.training.passes,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("training.batch_size", cfg.training.batch_size,
          [](const TomlValue& v) { return static_cast<int>(v.as_int()); });
    s.opt("training.learning_rate", cfg.training.learning_rate,
          [](const TomlValue& v) { return v.as_double(); });
    s.opt("training.baseline", cfg.training.baseline,
          [](const TomlValue& v) { return v.as_string(); });
    s.opt("training.entropy_bonus", cfg.training.entropy_bonus,
          [](const TomlValue& v) { return v.as_double(); });
    s.opt("training.entropy_bonus_final", cfg.training.entropy_bonus_final,
          [](const TomlValue& v) { return v.as_double(); });

    if (s.has("execution.spawn")) {
        for (const TomlValue& pt : s.at("execution.spawn").as_array()) {
            const auto& xy = pt.as_array();
            if (xy.size() != 2) throw ConfigError("spawn points must be [x, y] pairs");
            cfg.spawn.push_back({xy[0].as_double(), xy[1].as_double()});
        }
    }

    s.reject_unknown();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_toml_text(ss.str());
}

FloorPlan ExperimentConfig::load_plan() const {
    if (!geometry_file.empty()) return FloorPlan::from_json_file(geometry_file);
    if (geometry_builtin == "office") return FloorPlan::office_plan();
    if (geometry_builtin == "smoke") return FloorPlan::smoke_plan();
    throw ConfigError("unknown builtin geometry '" + geometry_builtin + "'");
}

std::vector<Vec2> ExperimentConfig::spawn_points(const FloorPlan& plan) const {
    if (!spawn.empty()) {
        if (static_cast<int>(spawn.size()) != n_agents)
            throw ConfigError("spawn point count does not match agent count");
        return spawn;
    }
    if (n_agents > plan.n_zones())
        throw ConfigError("default spawn needs N <= M; configure execution.spawn");
    std::vector<Vec2> pts;
    for (int n = 0; n < n_agents; ++n) pts.push_back(plan.zones[n].center);
    return pts;
}

void ExperimentConfig::validate() const {
    if (n_agents < 1) throw ConfigError("need at least one agent");
    if (thresholds.empty()) throw ConfigError("experiment.thresholds must be nonempty");
    dual_config().validate();
    if (speed <= 0) throw ConfigError("speed must be positive");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (seeds.empty()) throw ConfigError("at least one seed required");
    if (graph.model != "bernoulli" && graph.model != "proximity")
        throw ConfigError("graph.model must be 'bernoulli' or 'proximity'");
    if (graph.model == "bernoulli" && (graph.p <= 0 || graph.p > 1))
        throw ConfigError("graph.p must be in (0, 1]");
    if (graph.model == "proximity" && graph.disc <= 0)
        throw ConfigError("graph.disc must be positive");
    if (graph.footprint != "complete" && graph.footprint != "path")
        throw ConfigError("graph.footprint must be 'complete' or 'path'");
    if (training.baseline != "occupancy" && training.baseline != "episode_mean" &&
        training.baseline != "none")
        throw ConfigError(
            "training.baseline must be 'none', 'occupancy' or 'episode_mean'");

    double l1 = 0;
    for (double c : thresholds) l1 += c;
    if (l1 > n_agents - 1 && !allow_infeasible_thresholds)
        throw ConfigError(
            "||c||_1 > N - 1: the feasibility guarantee does not apply; set "
            "experiment.allow_infeasible_thresholds = true to run anyway");
}

// Hash of everything the trained parameters depend on (execution-only
// settings such as the horizon and seed list stay out).
std::uint64_t ExperimentConfig::config_hash() const {
    std::ostringstream ss;
    ss << n_agents << '|' << t0 << '|' << alpha << '|' << eta << '|' << speed << '|'
       << graph.model << '|' << graph.p << '|' << graph.disc << '|' << graph.footprint << '|'
       << policy.hidden << '|' << policy.lambda_max << '|' << policy.weight_cap << '|'
       << policy.sparse_fraction << '|' << geometry_builtin << '|' << geometry_file << '|'
       << training.solo_episodes << '|' << training.block_episodes << '|' << training.passes
       << '|' << training.batch_size << '|' << training.learning_rate << '|'
       << training.baseline << '|' << training.entropy_bonus << '|'
       << training.entropy_bonus_final;
    for (double c : thresholds) ss << '|' << c;
    return hash_str(ss.str());
}

}  // namespace patrol
