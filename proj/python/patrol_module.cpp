// Python bindings for the patrol core: geometry, gossip, duals, the
// analysis verifiers and full experiment runs.

#include <pybind11/pybind11.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>

#include "patrol/analysis.hpp"
#include "patrol/comms.hpp"
#include "patrol/errors.hpp"
#include "patrol/config.hpp"
#include "patrol/duals.hpp"
#include "patrol/env.hpp"
#include "patrol/gossip.hpp"
#include "patrol/policy.hpp"
#include "patrol/rng.hpp"
#include "patrol/runtime.hpp"

namespace py = pybind11;
using namespace patrol;

namespace {

Vec2 to_vec2(const std::pair<double, double>& p) { return {p.first, p.second}; }

ExperimentConfig config_from_kwargs(int n_agents, std::vector<double> thresholds, int t0,
                                    double alpha, double eta, double speed, long horizon,
                                    const std::string& graph_model, double p, double disc,
                                    const std::string& footprint, bool allow_infeasible,
                                    const std::string& geometry) {
    ExperimentConfig cfg;
    cfg.n_agents = n_agents;
    cfg.thresholds = std::move(thresholds);
    cfg.t0 = t0;
    cfg.alpha = alpha;
    cfg.eta = eta;
    cfg.speed = speed;
    cfg.horizon = horizon;
    cfg.graph.model = graph_model;
    cfg.graph.p = p;
    cfg.graph.disc = disc;
    cfg.graph.footprint = footprint;
    cfg.allow_infeasible_thresholds = allow_infeasible;
    cfg.geometry_builtin = geometry;
    cfg.validate();
    return cfg;
}

py::dict run_to_dict(const RunMetrics& run, const std::vector<double>& thresholds) {
    py::dict out;
    out["horizon"] = run.horizon;
    out["seed"] = run.seed;

    py::array_t<double> averages({run.horizon, static_cast<long>(run.n_zones)});
    auto avg = averages.mutable_unchecked<2>();
    for (long t = 0; t < run.horizon; ++t)
        for (int z = 0; z < run.n_zones; ++z) avg(t, z) = run.running_average(t, z);
    out["running_average"] = averages;

    const auto margins = run.final_margins(thresholds);
    out["final_margins"] = margins;

    const long k = static_cast<long>(run.local_multipliers.size());
    py::array_t<double> lam({k, static_cast<long>(run.n_agents), static_cast<long>(run.n_zones)});
    auto l = lam.mutable_unchecked<3>();
    for (long i = 0; i < k; ++i)
        for (int n = 0; n < run.n_agents; ++n)
            for (int z = 0; z < run.n_zones; ++z) l(i, n, z) = run.local_multipliers[i][n][z];
    out["local_multipliers"] = lam;

    py::array_t<double> central({k, static_cast<long>(run.n_zones)});
    auto cm = central.mutable_unchecked<2>();
    for (long i = 0; i < k; ++i)
        for (int z = 0; z < run.n_zones; ++z) cm(i, z) = run.central_multipliers[i][z];
    out["central_multipliers"] = central;

    out["divergence"] = run.divergence;
    out["multiplier_bound_ok"] = run.multiplier_bound_ok;
    out["gossip_payload_bits"] = run.gossip_payload_bits;

    py::array_t<long> occ({static_cast<long>(run.n_agents), static_cast<long>(run.bins_y),
                           static_cast<long>(run.bins_x)});
    auto o = occ.mutable_unchecked<3>();
    for (int n = 0; n < run.n_agents; ++n)
        for (int by = 0; by < run.bins_y; ++by)
            for (int bx = 0; bx < run.bins_x; ++bx)
                o(n, by, bx) = run.occupancy[n][static_cast<std::size_t>(by) * run.bins_x + bx];
    out["occupancy"] = occ;

    py::array_t<long> comm({static_cast<long>(run.n_agents), static_cast<long>(run.n_agents)});
    auto cc = comm.mutable_unchecked<2>();
    for (int a = 0; a < run.n_agents; ++a)
        for (int b = 0; b < run.n_agents; ++b) cc(a, b) = run.comm_counts[a][b];
    out["comm_counts"] = comm;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "multi-agent patrol simulator core";

    py::register_exception<ConfigError>(m, "PatrolConfigError");
    py::register_exception<UsageError>(m, "PatrolUsageError");

    py::class_<FloorPlan>(m, "FloorPlan")
        .def_static("office", &FloorPlan::office_plan)
        .def_static("smoke", &FloorPlan::smoke_plan)
        .def_static("from_json_file", &FloorPlan::from_json_file)
        .def_static("from_json_text", &FloorPlan::from_json_text)
        .def("to_json_text", &FloorPlan::to_json_text)
        .def_property_readonly("n_zones", &FloorPlan::n_zones)
        .def_property_readonly("n_tiles", &FloorPlan::n_tiles)
        .def("tile_index",
             [](const FloorPlan& p, double x, double y) { return p.tile_index({x, y}); })
        .def("line_of_sight", [](const FloorPlan& p, std::pair<double, double> a,
                                 std::pair<double, double> b) {
            return p.line_of_sight(to_vec2(a), to_vec2(b));
        })
        .def("route_length", [](const FloorPlan& p, std::pair<double, double> pos, int zone) {
            return p.route_length(to_vec2(pos), zone);
        })
        .def("zone_center", [](const FloorPlan& p, int zone) {
            const Vec2 c = p.zones.at(zone).center;
            return std::make_pair(c.x, c.y);
        });

    m.def(
        "reward",
        [](const FloorPlan& plan, const std::vector<std::pair<double, double>>& positions) {
            JointState s;
            for (const auto& p : positions) s.positions.push_back(to_vec2(p));
            std::vector<int> out;
            for (std::uint8_t v : reward(s, plan).values) out.push_back(v);
            return out;
        },
        py::arg("plan"), py::arg("positions"),
        "Binary task indicators: 1 iff some agent is inside the zone.");

    m.def(
        "step",
        [](const FloorPlan& plan, const std::vector<std::pair<double, double>>& positions,
           const std::vector<int>& targets, double speed) {
            JointState s;
            for (const auto& p : positions) s.positions.push_back(to_vec2(p));
            std::vector<Action> acts;
            for (int z : targets) acts.push_back({z});
            const JointState next = step(s, acts, plan, speed);
            std::vector<std::pair<double, double>> out;
            for (const Vec2& p : next.positions) out.emplace_back(p.x, p.y);
            return out;
        },
        py::arg("plan"), py::arg("positions"), py::arg("targets"), py::arg("speed") = 0.5);

    m.def("nbinom_cdf", &nbinom_cdf, py::arg("successes"), py::arg("p"), py::arg("trials"),
          "P(trials until J-th success <= i), exact summation.");

    m.def(
        "dual_update",
        [](const std::vector<double>& lam, const std::vector<double>& reward_sums, double alpha,
           double eta, int t0, const std::vector<double>& thresholds) {
            const DualConfig cfg{alpha, eta, t0, thresholds};
            cfg.validate();
            Multipliers ml{lam, 0};
            return contractive_update(ml, reward_sums, cfg).values;
        },
        py::arg("lam"), py::arg("reward_sums"), py::arg("alpha"), py::arg("eta"), py::arg("t0"),
        py::arg("thresholds"),
        "Contractive projected dual step from per-zone reward sums of one rollout.");

    m.def(
        "norm_bound",
        [](double alpha, double eta, int m) {
            return norm_bound(DualConfig{alpha, eta, 1, std::vector<double>(m, 0.0)}, m);
        },
        py::arg("alpha"), py::arg("eta"), py::arg("m"));

    m.def(
        "oracle_actions",
        [](const FloorPlan& plan, const std::vector<double>& lam,
           const std::vector<std::pair<double, double>>& positions) {
            std::vector<Vec2> pos;
            for (const auto& p : positions) pos.push_back(to_vec2(p));
            std::vector<int> out;
            for (const Action& a : oracle_greedy_policy(lam, pos, plan))
                out.push_back(a.target_zone);
            return out;
        },
        py::arg("plan"), py::arg("lam"), py::arg("positions"));

    m.def(
        "feasibility_margin",
        [](double alpha, double eta, int t0, const std::vector<double>& thresholds, int d_g,
           double p, double lipschitz, double eps_plus_beta) {
            const FeasibilityMargin tm =
                feasibility_margin(DualConfig{alpha, eta, t0, thresholds}, d_g, p, lipschitz,
                               eps_plus_beta);
            py::dict out;
            out["delta"] = tm.delta;
            out["alpha_min"] = tm.alpha_min;
            out["margin"] = tm.margin;
            out["delta_positive"] = tm.delta_positive;
            out["alpha_satisfies_bound"] = tm.alpha_satisfies_bound;
            return out;
        },
        py::arg("alpha"), py::arg("eta"), py::arg("t0"), py::arg("thresholds"), py::arg("d_g"),
        py::arg("p"), py::arg("lipschitz") = 1.0, py::arg("eps_plus_beta") = 0.01);

    m.def(
        "run_oracle",
        [](int n_agents, std::vector<double> thresholds, int t0, double alpha, double eta,
           double speed, long horizon, std::uint64_t seed, const std::string& graph_model,
           double p, double disc, const std::string& footprint, bool allow_infeasible,
           const std::string& geometry) {
            const ExperimentConfig cfg = config_from_kwargs(
                n_agents, std::move(thresholds), t0, alpha, eta, speed, horizon, graph_model, p,
                disc, footprint, allow_infeasible, geometry);
            const FloorPlan plan = cfg.load_plan();
            const RunMetrics run = execute_online(cfg, plan, {}, PolicyMode::Oracle, seed);
            return run_to_dict(run, cfg.thresholds);
        },
        py::arg("n_agents") = 5,
        py::arg("thresholds") = std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6},
        py::arg("t0") = 100, py::arg("alpha") = 0.01, py::arg("eta") = 0.5,
        py::arg("speed") = 0.5, py::arg("horizon") = 2000, py::arg("seed") = 1,
        py::arg("graph_model") = "proximity", py::arg("p") = 0.5, py::arg("disc") = 5.0,
        py::arg("footprint") = "complete", py::arg("allow_infeasible") = false,
        py::arg("geometry") = "office",
        "Execute the distributed patrol loop under the scripted oracle policy.");

    m.def(
        "verify_dissemination",
        [](int path_nodes, double p, long trials, int t0, std::uint64_t seed) {
            const auto res =
                verify_dissemination(FootprintGraph::path(path_nodes), p, trials, t0, seed);
            py::dict out;
            out["bound"] = res.expectation.bound;
            out["empirical"] = res.expectation.empirical;
            out["std_error"] = res.expectation.std_error;
            out["holds"] = res.expectation.verdict == BoundReport::Verdict::Holds;
            out["arrival_law_consistent"] = res.arrival_law_consistent;
            out["empirical_cdf"] = res.empirical_cdf;
            out["exact_cdf"] = res.exact_cdf;
            return out;
        },
        py::arg("path_nodes") = 3, py::arg("p") = 0.5, py::arg("trials") = 2000,
        py::arg("t0") = 50, py::arg("seed") = 1);
}
