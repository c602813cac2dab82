#include "mmv2x/experiment.hpp"

#include "mmv2x/format.hpp"
#include "mmv2x/simulation.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

namespace mmv2x {

namespace fs = std::filesystem;

std::string cell_id(Strategy strategy, int vehicle_count, double connected_fraction, std::uint64_t seed)
{
    return to_string(strategy) + "-n" + std::to_string(vehicle_count) + "-f" + format_double(connected_fraction)
        + "-s" + std::to_string(seed);
}

SummaryRow summarize(const std::string& cell, const RunResult& result)
{
    SummaryRow row;
    row.cell_id = cell;
    row.strategy = result.strategy;
    row.vehicle_count = result.vehicle_count;
    row.connected_fraction = result.connected_fraction;
    row.seed = result.seed;
    row.satisfied_sum = result.satisfied_sum;
    row.total_sum = result.total_sum;
    row.reliability = result.reliability;
    row.prediction_error_mean = result.prediction_error_mean;
    row.predictor_fallbacks = result.predictor_fallbacks;
    return row;
}

void write_summary_header(std::ostream& os)
{
    os << "cell_id,strategy,vehicle_count,connected_fraction,seed,connected_satisfied_sum,connected_total_sum,"
          "reliability,prediction_error_mean,predictor_fallbacks\n";
}

void write_summary_row(std::ostream& os, const SummaryRow& row)
{
    os << row.cell_id << ',' << to_string(row.strategy) << ',' << row.vehicle_count << ','
       << format_double(row.connected_fraction) << ',' << row.seed << ',' << row.satisfied_sum << ','
       << row.total_sum << ',' << (row.reliability ? format_double(*row.reliability) : "") << ','
       << (row.prediction_error_mean ? format_double(*row.prediction_error_mean) : "") << ','
       << row.predictor_fallbacks << '\n';
}

void write_detail_file(const fs::path& out_dir, const std::string& cell, const RunResult& result)
{
    fs::create_directories(out_dir / "detail");
    std::ofstream os(out_dir / "detail" / (cell + ".csv"));
    write_outcomes_header(os);
    write_outcomes(os, result);
    if (!os) {
        throw std::runtime_error("failed writing detail file for " + cell);
    }
}

void write_summary_file(const fs::path& out_dir, const std::vector<SummaryRow>& rows)
{
    fs::create_directories(out_dir);
    std::ofstream os(out_dir / "summary.csv");
    write_summary_header(os);
    for (const auto& r : rows) {
        write_summary_row(os, r);
    }
    if (!os) {
        throw std::runtime_error("failed writing summary.csv");
    }
}

void write_plot_files(const fs::path& out_dir, const std::vector<SummaryRow>& rows)
{
    struct Cell {
        double sum = 0.0;
        int n = 0;
    };
    std::map<std::tuple<double, std::string, int>, Cell> groups;
    std::set<double> fractions;
    std::set<std::string> strategies;
    for (const auto& r : rows) {
        if (!r.reliability) {
            continue;
        }
        auto& g = groups[{r.connected_fraction, to_string(r.strategy), r.vehicle_count}];
        g.sum += *r.reliability;
        ++g.n;
        fractions.insert(r.connected_fraction);
        strategies.insert(to_string(r.strategy));
    }

    fs::create_directories(out_dir);
    {
        std::ofstream os(out_dir / "aggregate.csv");
        os << "connected_fraction,strategy,vehicle_count,mean_reliability,cells\n";
        for (const auto& [key, g] : groups) {
            os << format_double(std::get<0>(key)) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
               << format_double(g.sum / g.n) << ',' << g.n << '\n';
        }
    }

    std::ofstream gp(out_dir / "plots.gp");
    gp << "# Reliability against vehicle count, one panel per connected fraction.\n"
          "# Usage: gnuplot plots.gp  (writes reliability.png)\n"
          "set datafile separator ','\n"
          "set terminal pngcairo size "
       << 640 * std::max<std::size_t>(1, fractions.size())
       << ",480\n"
          "set output 'reliability.png'\n"
          "set key bottom left\n"
          "set xlabel 'Number of vehicles'\n"
          "set ylabel 'Reliability'\n"
          "set yrange [*:1.0]\n"
          "set multiplot layout 1,"
       << std::max<std::size_t>(1, fractions.size()) << "\n";
    for (double f : fractions) {
        gp << "set title 'connected fraction " << format_double(f) << "'\n";
        gp << "plot ";
        bool first = true;
        for (const auto& s : strategies) {
            if (!first) {
                gp << ", \\\n     ";
            }
            first = false;
            gp << "'aggregate.csv' every ::1 using 3:(($1 == " << format_double(f) << " && strcol(2) eq '" << s
               << "') ? $4 : 1/0) with linespoints title '" << s << "'";
        }
        gp << "\n";
    }
    gp << "unset multiplot\n";
}

SweepSpec sweep_spec_from_json_text(const std::string& text, const fs::path& relative_to)
{
    using nlohmann::json;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("sweep spec parse error: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("sweep spec must be an object");
    }
    static const std::set<std::string> known{"base_config", "vehicle_counts", "connected_fractions", "strategies",
                                             "seeds"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!known.contains(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in sweep spec");
        }
    }
    SweepSpec spec;
    try {
        spec.base_config = root.at("base_config").get<std::string>();
        if (spec.base_config.is_relative()) {
            spec.base_config = relative_to / spec.base_config;
        }
        spec.vehicle_counts = root.value("vehicle_counts", std::vector<int>{});
        spec.connected_fractions = root.value("connected_fractions", std::vector<double>{});
        for (const auto& s : root.value("strategies", std::vector<std::string>{})) {
            spec.strategies.push_back(parse_strategy(s));
        }
        spec.seeds = root.value("seeds", std::vector<std::uint64_t>{});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("sweep spec: ") + e.what());
    }
    return spec;
}

SweepSpec load_sweep_spec(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open sweep spec " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return sweep_spec_from_json_text(buf.str(), path.parent_path());
}

std::vector<SweepCell> expand_sweep(const SweepSpec& spec, const ScenarioConfig& base)
{
    std::vector<SweepCell> cells;
    cells.reserve(spec.cell_count());
    for (int count : spec.vehicle_counts) {
        for (double fraction : spec.connected_fractions) {
            for (Strategy strategy : spec.strategies) {
                for (std::uint64_t seed : spec.seeds) {
                    ScenarioConfig c = base;
                    c.vehicle_count = count;
                    c.connected_fraction = fraction;
                    c.strategy = strategy;
                    c.seed = seed;
                    cells.push_back({cell_id(strategy, count, fraction, seed), std::move(c)});
                }
            }
        }
    }
    return cells;
}

ValidationReport validate_sweep(const SweepSpec& spec, const ScenarioConfig& base)
{
    ValidationReport report;
    auto need = [&](bool ok, const char* field) {
        if (!ok) {
            report.violations.push_back({field, "must not be empty"});
        }
    };
    need(!spec.vehicle_counts.empty(), "vehicle_counts");
    need(!spec.connected_fractions.empty(), "connected_fractions");
    need(!spec.strategies.empty(), "strategies");
    need(!spec.seeds.empty(), "seeds");
    for (const auto& cell : expand_sweep(spec, base)) {
        for (const auto& v : validate_config(cell.config).violations) {
            report.violations.push_back({cell.id + "." + v.field, v.message});
        }
    }
    return report;
}

std::vector<SummaryRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base, const SweepOptions& options)
{
    const ValidationReport report = validate_sweep(spec, base);
    if (!report.ok()) {
        throw ConfigError("invalid sweep:\n" + report.to_string());
    }
    const std::vector<SweepCell> cells = expand_sweep(spec, base);
    std::vector<std::optional<SummaryRow>> rows(cells.size());
    std::atomic<bool> abort{false};
    std::optional<SweepError> failure;
    std::mutex mu;

    const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, options.jobs))
    for (std::int64_t i = 0; i < n; ++i) {
        if (abort.load()) {
            continue;
        }
        const SweepCell& cell = cells[static_cast<std::size_t>(i)];
        try {
            const RunResult result = run_single(cell.config);
            write_detail_file(options.out_dir, cell.id, result);
            rows[static_cast<std::size_t>(i)] = summarize(cell.id, result);
            if (options.progress) {
                std::lock_guard lock(mu);
                options.progress(cell.id);
            }
        } catch (const std::exception& e) {
            std::lock_guard lock(mu);
            if (!failure) {
                failure.emplace(cell.id, e.what());
            }
            abort.store(true);
        }
    }

    std::vector<SummaryRow> done;
    for (auto& r : rows) {
        if (r) {
            done.push_back(std::move(*r));
        }
    }
    write_summary_file(options.out_dir, done);
    if (failure) {
        throw *failure;
    }
    write_plot_files(options.out_dir, done);
    return done;
}

}  // namespace mmv2x
