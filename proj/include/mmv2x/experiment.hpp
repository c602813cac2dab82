#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmv2x {

/// One row of summary.csv.
struct SummaryRow {
    std::string cell_id;
    Strategy strategy = Strategy::RealTime;
    int vehicle_count = 0;
    double connected_fraction = 1.0;
    std::uint64_t seed = 0;
    std::int64_t satisfied_sum = 0;
    std::int64_t total_sum = 0;
    std::optional<double> reliability;
    std::optional<double> prediction_error_mean;
    std::int64_t predictor_fallbacks = 0;
};

/// e.g. "RealTime-n30-f0.5-s3"
std::string cell_id(Strategy strategy, int vehicle_count, double connected_fraction, std::uint64_t seed);

SummaryRow summarize(const std::string& cell, const RunResult& result);

void write_summary_header(std::ostream& os);
void write_summary_row(std::ostream& os, const SummaryRow& row);

/// Writes <out_dir>/detail/<cell>.csv.
void write_detail_file(const std::filesystem::path& out_dir, const std::string& cell, const RunResult& result);

/// Writes <out_dir>/summary.csv.
void write_summary_file(const std::filesystem::path& out_dir, const std::vector<SummaryRow>& rows);

/// Mean reliability per (connected_fraction, strategy, vehicle_count) in
/// aggregate.csv, plus plots.gp rendering reliability against vehicle count
/// with one panel per connected fraction and one line per strategy.
void write_plot_files(const std::filesystem::path& out_dir, const std::vector<SummaryRow>& rows);

struct SweepSpec {
    std::filesystem::path base_config;
    std::vector<int> vehicle_counts;
    std::vector<double> connected_fractions;
    std::vector<Strategy> strategies;
    std::vector<std::uint64_t> seeds;

    std::size_t cell_count() const
    {
        return vehicle_counts.size() * connected_fractions.size() * strategies.size() * seeds.size();
    }
};

/// JSON object with keys base_config, vehicle_counts, connected_fractions,
/// strategies, seeds. A relative base_config resolves against the spec's
/// directory. Throws ConfigError on malformed input or unknown keys.
SweepSpec load_sweep_spec(const std::filesystem::path& path);
SweepSpec sweep_spec_from_json_text(const std::string& text, const std::filesystem::path& relative_to);

struct SweepCell {
    std::string id;
    ScenarioConfig config;
};

/// Cartesian product in the order counts, fractions, strategies, seeds.
std::vector<SweepCell> expand_sweep(const SweepSpec& spec, const ScenarioConfig& base);

/// Empty lists and any cell whose config fails validation are reported.
ValidationReport validate_sweep(const SweepSpec& spec, const ScenarioConfig& base);

class SweepError : public std::runtime_error {
public:
    SweepError(std::string cell, const std::string& message)
        : std::runtime_error("cell " + cell + ": " + message), cell_(std::move(cell))
    {
    }
    const std::string& cell() const { return cell_; }

private:
    std::string cell_;
};

struct SweepOptions {
    std::filesystem::path out_dir;
    int jobs = 1;
    std::function<void(const std::string&)> progress;  // called once per finished cell
};

/// Runs every cell independently, up to `jobs` at a time, writing a detail
/// file per cell, summary.csv, aggregate.csv and plots.gp. On the first
/// failing cell the remaining cells are skipped, summary.csv keeps the
/// completed rows, and SweepError names the failing cell.
/// Throws ConfigError when validate_sweep reports a problem.
std::vector<SummaryRow> run_sweep(const SweepSpec& spec, const ScenarioConfig& base, const SweepOptions& options);

}  // namespace mmv2x
