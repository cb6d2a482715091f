// evtrig: command-line front end for the event-triggered estimation library.

#include "evtrig/analysis.hpp"
#include "evtrig/assumptions.hpp"
#include "evtrig/config.hpp"
#include "evtrig/csv.hpp"
#include "evtrig/errors.hpp"
#include "evtrig/experiment.hpp"
#include "evtrig/graph.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace evtrig;

namespace {

struct GlobalFlags {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::size_t workers = 1;
    bool quiet = false;
};

ExperimentConfig load(const std::string& path, const GlobalFlags& flags) {
    ExperimentConfig cfg = load_config(path);
    if (flags.seed) cfg.seed = *flags.seed;
    return cfg;
}

std::string output_dir(const ExperimentConfig& cfg, const GlobalFlags& flags) {
    std::string dir = flags.out_dir;
    if (dir.empty()) dir = cfg.output_dir;
    if (dir.empty()) {
        const char* env = std::getenv("EVTRIG_OUT_DIR");
        dir = env && *env ? env : "evtrig_out";
    }
    fs::create_directories(dir);
    return dir;
}

std::string path_in(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void write_config_echo(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

const char* yes_no(bool v) { return v ? "true" : "false"; }

int cmd_run(const std::string& config_path, std::size_t run_index, const GlobalFlags& flags) {
    const ExperimentConfig cfg = load(config_path, flags);
    if (cfg.algorithm.matched_period()) {
        throw ConfigError("algorithm.period", "\"matched\" is only resolved by montecarlo and compare");
    }
    const RunTrace trace = run_single(cfg, cfg.algorithm, run_index);
    const std::string dir = output_dir(cfg, flags);
    write_trace_csv(path_in(dir, "trace.csv"), trace);
    write_events_csv(path_in(dir, "events.csv"), trace);
    if (!trace.snapshots.empty()) write_snapshots_csv(path_in(dir, "snapshots.csv"), trace);
    if (!flags.quiet) {
        std::cout << cfg.algorithm.display_name() << ", run " << run_index << ", T = " << trace.horizon << "\n"
                  << "  final squared error: " << format_number(trace.squared_error.back()) << "\n"
                  << "  events: " << trace.total_events() << ", messages: " << trace.total_messages() << "\n"
                  << "  lambda_c(T): " << format_number(communication_rate(trace, trace.horizon)) << "\n"
                  << "  output: " << dir << "\n";
    }
    return 0;
}

void print_result_line(const MonteCarloResult& r) {
    std::ostringstream line;
    line << std::setprecision(6) << "  " << std::left << std::setw(24) << r.algorithm << std::right << std::setw(8)
         << (r.period > 0 ? std::to_string(r.period) : std::string("-")) << std::setw(14) << r.mean_rate.back()
         << std::setw(16) << r.mse.back() << "\n";
    std::cout << line.str();
}

void print_table_header() {
    std::cout << "  " << std::left << std::setw(24) << "algorithm" << std::right << std::setw(8) << "period"
              << std::setw(14) << "lambda_c(T)" << std::setw(16) << "MSE(T)" << "\n";
}

int cmd_montecarlo(const std::string& config_path, const GlobalFlags& flags) {
    const ExperimentConfig cfg = load(config_path, flags);
    ExperimentOptions options;
    options.workers = flags.workers;
    const MonteCarloResult result = run_experiment(cfg, options);
    const std::string dir = output_dir(cfg, flags);
    write_aggregate_csv(path_in(dir, "aggregate.csv"), result);
    write_runs_csv(path_in(dir, "runs.csv"), result);
    write_estimates_csv(path_in(dir, "estimates.csv"), result);
    write_config_echo(path_in(dir, "config.json"), result.config_echo);
    if (!flags.quiet) {
        std::cout << (cfg.name.empty() ? config_path : cfg.name) << ": " << result.runs << " runs, T = "
                  << result.horizon << ", seed " << result.seed << "\n";
        print_table_header();
        print_result_line(result);
        std::cout << "  output: " << dir << "\n";
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const GlobalFlags& flags) {
    std::vector<MonteCarloResult> all;
    std::string dir;
    ExperimentOptions options;
    options.workers = flags.workers;
    for (const auto& path : config_paths) {
        const ExperimentConfig cfg = load(path, flags);
        auto results = run_comparison(cfg, options);
        if (dir.empty()) dir = output_dir(cfg, flags);
        if (!flags.quiet) {
            std::cout << (cfg.name.empty() ? path : cfg.name) << ": " << cfg.runs << " runs, T = " << cfg.horizon
                      << ", seed " << cfg.seed << "\n";
            print_table_header();
            for (const auto& r : results) print_result_line(r);
        }
        const std::string prefix = config_paths.size() > 1 ? (cfg.name.empty() ? fs::path(path).stem().string() : cfg.name) + "." : "";
        for (auto& r : results) {
            r.algorithm = prefix + r.algorithm;
            write_aggregate_csv(path_in(dir, "aggregate_" + r.algorithm + ".csv"), r);
            all.push_back(std::move(r));
        }
    }
    write_comparison_csv(path_in(dir, "compare.csv"), all);
    if (!flags.quiet) std::cout << "  output: " << dir << "\n";
    return 0;
}

int cmd_check(const std::string& config_path, const GlobalFlags& flags) {
    const ExperimentConfig cfg = load(config_path, flags);
    const SensorGraph g = build_graph(cfg);
    const ObservationModel model = build_model(cfg);
    const Schedules s = build_schedules(cfg);

    const GramianReport gramian = gramian_check(g, model, 1, 10, 200, 1e-8, cfg.seed);
    const bool balanced = is_balanced(g);
    std::cout << "graph: " << g.size() << " sensors, " << g.edge_count() << " directed edges\n";
    std::cout << "balanced: " << yes_no(balanced) << ", spanning tree: " << yes_no(has_spanning_tree(g))
              << ", observability gramian lambda_min = " << gramian.min_observability() << "\n";
    std::cout << "mirror graph connected: " << yes_no(mirror_connected(g)) << "\n";
    if (balanced) std::cout << "mirror laplacian lambda_2 = " << lambda2_mirror(g) << "\n";
    std::cout << gramian.to_text();
    std::cout << check_assumption1(s, cfg.horizon).to_text();
    std::cout << check_assumption2(s, cfg.horizon).to_text();
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& column, const std::string& window,
            const std::string& time_column, const GlobalFlags& flags) {
    std::int64_t t1 = 0;
    std::int64_t t2 = 0;
    char comma = 0;
    std::istringstream in(window);
    if (!(in >> t1 >> comma >> t2) || comma != ',' || !in.eof()) {
        throw ArgumentError("--window expects a,b");
    }
    const CsvTable table = read_csv(csv_path);
    const auto values = table.numeric_column(column);
    const auto times = table.numeric_column(time_column);
    std::vector<double> series(static_cast<std::size_t>(std::max<std::int64_t>(t2, 0)) + 1,
                               std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < times.size(); ++r) {
        const double t = times[r];
        if (t >= 0.0 && t <= static_cast<double>(t2) && t == std::floor(t)) {
            series[static_cast<std::size_t>(t)] = values[r];
        }
    }
    const RateFit fit = fit_decay(series, t1, t2);
    if (flags.quiet) {
        std::cout << format_number(fit.exponent) << "\n";
    } else {
        std::cout << "fit of " << column << " over [" << t1 << ", " << t2 << "]: exponent "
                  << format_number(fit.exponent) << ", log intercept " << format_number(fit.log_intercept)
                  << ", residual rms " << format_number(fit.residual_rms) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered distributed estimation simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags flags;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--out-dir", flags.out_dir, "Output directory (default: config, then $EVTRIG_OUT_DIR)");
    app.add_option("--workers", flags.workers, "Monte Carlo worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", flags.quiet, "Only essential output");

    std::string config;
    std::size_t run_index = 0;
    auto* run = app.add_subcommand("run", "Single run, CSV trace out");
    run->add_option("config", config, "Config file")->required();
    run->add_option("--run", run_index, "Run index (selects the sub-seed)");

    auto* mc = app.add_subcommand("montecarlo", "Monte Carlo aggregate");
    mc->add_option("config", config, "Config file")->required();

    std::vector<std::string> configs;
    auto* compare = app.add_subcommand("compare", "MSE and communication-rate table across algorithms");
    compare->add_option("configs", configs, "Config files")->required();

    auto* check = app.add_subcommand("check", "Graph, observability and step-size report");
    check->add_option("config", config, "Config file")->required();

    std::string csv_path;
    std::string column;
    std::string window;
    std::string time_column = "t";
    auto* fit = app.add_subcommand("fit", "Decay-exponent fit of a CSV column");
    fit->add_option("csv", csv_path, "CSV file")->required();
    fit->add_option("--col", column, "Column to fit")->required();
    fit->add_option("--window", window, "Fit window a,b")->required();
    fit->add_option("--time-col", time_column, "Time column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (*seed_opt) flags.seed = seed;

    try {
        if (*run) return cmd_run(config, run_index, flags);
        if (*mc) return cmd_montecarlo(config, flags);
        if (*compare) return cmd_compare(configs, flags);
        if (*check) return cmd_check(config, flags);
        if (*fit) return cmd_fit(csv_path, column, window, time_column, flags);
    } catch (const DivergenceError& e) {
        std::cerr << "diverged at t=" << e.time() << ", sensor " << e.sensor() + 1 << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
