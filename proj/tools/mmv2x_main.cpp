// mmv2x: command-line driver for the multi-hop mmWave V2X routing simulator.
//
//   mmv2x validate <config.json>
//   mmv2x run      <config.json> [--seed N] [--strategy S] [--out-dir D] [--dump-topology] [--dump-routes]
//                                [--export-trace]
//   mmv2x sweep    <sweep.json>  --out-dir D [--jobs N]
//   mmv2x replay   <config.json> <trace.csv> [--strategy S] [--out-dir D]
//
// Exit codes: 0 success, 2 config or validation error, 3 runtime error.

#include "mmv2x/config.hpp"
#include "mmv2x/experiment.hpp"
#include "mmv2x/simulation.hpp"
#include "mmv2x/trace_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using namespace mmv2x;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

ScenarioConfig load_valid_config(const std::string& path, std::optional<std::uint64_t> seed,
                                 const std::string& strategy)
{
    ScenarioConfig cfg = load_config(path);
    if (seed) {
        cfg.seed = *seed;
    }
    if (!strategy.empty()) {
        cfg.strategy = parse_strategy(strategy);
    }
    const ValidationReport report = validate_config(cfg);
    if (!report.ok()) {
        throw ConfigError("invalid config " + path + ":\n" + report.to_string());
    }
    return cfg;
}

/// Optional per-step dump files for a run.
struct Dumps {
    std::unique_ptr<std::ofstream> topology;
    std::unique_ptr<std::ofstream> routes;
    std::unique_ptr<std::ofstream> trace;

    SimulationHooks hooks()
    {
        SimulationHooks h;
        if (topology) {
            h.on_ground_truth = [this](const ConnectivityGraph& g) { write_edge_list(*topology, g); };
        }
        if (routes) {
            h.on_routes = [this](std::size_t, std::int64_t t, std::span<const NodeId> demands, const RouteTable* table,
                                 const ConnectivityGraph& truth) { write_route_dump(*routes, t, demands, table, truth); };
        }
        if (trace) {
            h.on_snapshot = [this](const WorldSnapshot& s) { write_trace_snapshot(*trace, s); };
        }
        return h;
    }
};

void emit_result(const RunResult& result, const std::string& out_dir)
{
    const std::string cell = cell_id(result.strategy, result.vehicle_count, result.connected_fraction, result.seed);
    const SummaryRow row = summarize(cell, result);
    if (!out_dir.empty()) {
        write_detail_file(out_dir, cell, result);
        write_summary_file(out_dir, {row});
    }
    write_summary_header(std::cout);
    write_summary_row(std::cout, row);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Digital-twin multi-hop mmWave V2X routing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trace_path;
    std::string spec_path;
    std::string out_dir;
    std::string strategy;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    bool dump_topology = false;
    bool dump_routes = false;
    bool export_trace = false;

    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("config", config_path, "Scenario config (JSON)")->required();

    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--seed", seed, "Override the config seed");
    run->add_option("--strategy", strategy, "RealTime, Predictive or Conventional");
    run->add_option("--out-dir", out_dir, "Write summary.csv and detail/ here");
    run->add_flag("--dump-topology", dump_topology, "Write topology.csv edge lists (needs --out-dir)");
    run->add_flag("--dump-routes", dump_routes, "Write routes.csv route tables (needs --out-dir)");
    run->add_flag("--export-trace", export_trace, "Write trace.csv with every snapshot (needs --out-dir)");

    auto* sweep = app.add_subcommand("sweep", "Run a Cartesian sweep of scenarios");
    sweep->add_option("spec", spec_path, "Sweep spec (JSON)")->required();
    sweep->add_option("--out-dir", out_dir, "Output directory")->required();
    sweep->add_option("--jobs", jobs, "Cells run in parallel")->check(CLI::PositiveNumber);

    auto* replay = app.add_subcommand("replay", "Route and score an external snapshot trace");
    replay->add_option("config", config_path, "Scenario config (JSON)")->required();
    replay->add_option("trace", trace_path, "Trace CSV")->required();
    replay->add_option("--strategy", strategy, "RealTime, Predictive or Conventional");
    replay->add_option("--out-dir", out_dir, "Write summary.csv and detail/ here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) {
            const ScenarioConfig cfg = load_config(config_path);
            const ValidationReport report = validate_config(cfg);
            if (!report.ok()) {
                std::cerr << report.to_string();
                return kExitConfig;
            }
            std::cerr << "ok\n";
            return 0;
        }

        if (run->parsed()) {
            const ScenarioConfig cfg = load_valid_config(config_path, seed, strategy);
            if ((dump_topology || dump_routes || export_trace) && out_dir.empty()) {
                throw ConfigError("dump options need --out-dir");
            }
            Dumps dumps;
            if (!out_dir.empty()) {
                fs::create_directories(out_dir);
            }
            if (dump_topology) {
                dumps.topology = std::make_unique<std::ofstream>(fs::path(out_dir) / "topology.csv");
                write_edge_list_header(*dumps.topology);
            }
            if (dump_routes) {
                dumps.routes = std::make_unique<std::ofstream>(fs::path(out_dir) / "routes.csv");
                write_route_dump_header(*dumps.routes);
            }
            if (export_trace) {
                dumps.trace = std::make_unique<std::ofstream>(fs::path(out_dir) / "trace.csv");
                write_trace_header(*dumps.trace);
            }
            std::cerr << "running " << to_string(cfg.strategy) << " for " << cfg.total_steps() << " steps\n";
            emit_result(run_single(cfg, dumps.hooks()), out_dir);
            return 0;
        }

        if (sweep->parsed()) {
            const SweepSpec spec = load_sweep_spec(spec_path);
            const ScenarioConfig base = load_config(spec.base_config);
            SweepOptions options;
            options.out_dir = out_dir;
            options.jobs = jobs;
            std::size_t finished = 0;
            const std::size_t total = spec.cell_count();
            options.progress = [&](const std::string& cell) {
                std::cerr << '[' << ++finished << '/' << total << "] " << cell << '\n';
            };
            const auto rows = run_sweep(spec, base, options);
            std::cerr << "wrote " << rows.size() << " rows to " << (fs::path(out_dir) / "summary.csv").string() << '\n';
            return 0;
        }

        if (replay->parsed()) {
            const ScenarioConfig cfg = load_valid_config(config_path, std::nullopt, strategy);
            std::ifstream in(trace_path);
            if (!in) {
                throw ConfigError("cannot open trace " + trace_path);
            }
            const auto snapshots = snapshots_from_trace(read_trace(in), cfg);
            const StrategySettings settings = StrategySettings::from_config(cfg);
            auto results = simulate_replay(snapshots, cfg, std::span<const StrategySettings>(&settings, 1));
            emit_result(results.front(), out_dir);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SweepError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
