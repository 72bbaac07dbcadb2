#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "patrol/errors.hpp"
#include "patrol/runtime.hpp"

namespace patrol {

namespace {

// All numeric output goes through one formatter so identical runs produce
// byte-identical files.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path);
    return out;
}

// Zone-average envelope across seeds; `upper` selects max (averages.csv)
// vs min (minimums.csv). Columns: M zone averages, then the timestep.
void write_envelope(const std::string& path, const std::vector<RunMetrics>& per_seed,
                    bool upper) {
    auto out = open_out(path);
    const RunMetrics& first = per_seed.front();
    for (long t = 0; t < first.horizon; ++t) {
        for (int z = 0; z < first.n_zones; ++z) {
            double v = upper ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
            for (const RunMetrics& run : per_seed) {
                const double a = run.running_average(t, z);
                v = upper ? std::max(v, a) : std::min(v, a);
            }
            out << fmt(v) << ',';
        }
        out << t << '\n';
    }
}

}  // namespace

void write_run_outputs(const std::string& out_dir, const ExperimentConfig& cfg,
                       const std::vector<RunMetrics>& per_seed) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const RunMetrics& first = per_seed.front();

    write_envelope(out_dir + "/averages.csv", per_seed, true);
    write_envelope(out_dir + "/minimums.csv", per_seed, false);

    {
        // Pairwise communication frequencies of the first seed's run,
        // "row col value" triplets with a blank line between matrix rows.
        auto out = open_out(out_dir + "/gossip_matrix.dat");
        for (int a = 0; a < first.n_agents; ++a) {
            for (int b = 0; b < first.n_agents; ++b)
                out << a << ' ' << b << ' '
                    << fmt(static_cast<double>(first.comm_counts[a][b]) / first.horizon) << '\n';
            out << '\n';
        }
    }
    {
        auto out = open_out(out_dir + "/gossip_trajectories.dat");
        for (long t = 0; t < first.horizon; ++t) {
            out << t;
            for (int n = 0; n < first.n_agents; ++n) out << ' ' << first.neighborhood_sizes[t][n];
            out << '\n';
        }
    }
    {
        // Rows: seed,k,agent,lambda_0..lambda_{M-1}
        auto out = open_out(out_dir + "/multipliers.csv");
        for (const RunMetrics& run : per_seed)
            for (std::size_t k = 0; k < run.local_multipliers.size(); ++k)
                for (int n = 0; n < run.n_agents; ++n) {
                    out << run.seed << ',' << k << ',' << n;
                    for (double v : run.local_multipliers[k][n]) out << ',' << fmt(v);
                    out << '\n';
                }
    }
    for (int n = 0; n < first.n_agents; ++n) {
        // Dense grid, one row per y bin (bottom to top), counts comma-separated.
        auto out = open_out(out_dir + "/occupancy_agent" + std::to_string(n) + ".csv");
        for (int by = 0; by < first.bins_y; ++by) {
            for (int bx = 0; bx < first.bins_x; ++bx) {
                if (bx) out << ',';
                out << first.occupancy[n][static_cast<std::size_t>(by) * first.bins_x + bx];
            }
            out << '\n';
        }
    }
    {
        // Rows: zone,min_margin,max_margin across seeds.
        auto out = open_out(out_dir + "/margins.csv");
        for (int z = 0; z < first.n_zones; ++z) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (const RunMetrics& run : per_seed) {
                const double margin =
                    run.running_average(run.horizon - 1, z) - cfg.thresholds[z];
                lo = std::min(lo, margin);
                hi = std::max(hi, margin);
            }
            out << z << ',' << fmt(lo) << ',' << fmt(hi) << '\n';
        }
    }
}

void write_margin_radius_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    for (const SweepRow& r : rows)
        out << fmt(r.disc) << ',' << fmt(r.min_margin) << ',' << fmt(r.max_margin) << '\n';
}

}  // namespace patrol
