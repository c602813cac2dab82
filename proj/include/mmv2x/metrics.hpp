#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmv2x {

/// Connection outcome of one timestep: how many connected vehicles were alive
/// and how many of them held a working route to the RSU.
struct TimestepOutcome {
    std::int64_t timestep = 0;
    std::int64_t connected_total = 0;
    std::int64_t connected_satisfied = 0;
    std::map<NodeId, bool> per_vehicle;
    double mean_hops_of_valid_routes = 0.0;

    friend bool operator==(const TimestepOutcome&, const TimestepOutcome&) = default;
};

/// Thrown when reliability is requested but no connected vehicle was ever scored.
class UndefinedMetric : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Running sums behind
///
///     reliability = sum_t CV_connected,t / sum_t CV_total,t
///
/// which is a ratio of sums, not a mean of per-step ratios. Steps with no
/// connected vehicle add nothing to either sum.
class ReliabilityAccumulator {
public:
    /// Any order is accepted. Throws ContractViolation on a duplicate timestep
    /// or when satisfied exceeds total.
    void record(TimestepOutcome outcome);

    /// Throws UndefinedMetric when the denominator is zero.
    double reliability() const;

    /// Component-wise sum; outcome lists are concatenated as given. Throws
    /// ContractViolation when both sides hold the same timestep.
    void merge(const ReliabilityAccumulator& other);

    std::int64_t satisfied_sum() const { return satisfied_; }
    std::int64_t total_sum() const { return total_; }
    const std::vector<TimestepOutcome>& outcomes() const { return outcomes_; }

private:
    std::vector<TimestepOutcome> outcomes_;
    std::set<std::int64_t> seen_;
    std::int64_t satisfied_ = 0;
    std::int64_t total_ = 0;
};

struct RunResult {
    std::string config_digest;
    Strategy strategy = Strategy::RealTime;
    std::uint64_t seed = 0;
    int vehicle_count = 0;
    double connected_fraction = 1.0;
    std::optional<double> reliability;  // empty when no connected vehicle was ever scored
    std::int64_t satisfied_sum = 0;
    std::int64_t total_sum = 0;
    std::vector<TimestepOutcome> outcomes;
    std::optional<double> prediction_error_mean;  // predictive runs only
    std::int64_t predictor_fallbacks = 0;
};

/// timestep,strategy,connected_total,connected_satisfied,mean_hops
void write_outcomes_header(std::ostream& os);
void write_outcomes(std::ostream& os, const RunResult& result);

/// Re-applies the ratio of sums to the per-timestep columns of a detail CSV.
/// Throws UndefinedMetric on an empty denominator.
double reliability_from_detail_csv(std::istream& is);

}  // namespace mmv2x
