#include "mmv2x/metrics.hpp"

#include "mmv2x/format.hpp"

#include <istream>
#include <ostream>

namespace mmv2x {

void ReliabilityAccumulator::record(TimestepOutcome outcome)
{
    if (outcome.connected_total < 0 || outcome.connected_satisfied < 0
        || outcome.connected_satisfied > outcome.connected_total) {
        throw ContractViolation("record: need 0 <= satisfied <= total");
    }
    if (!seen_.insert(outcome.timestep).second) {
        throw ContractViolation("record: duplicate timestep " + std::to_string(outcome.timestep));
    }
    satisfied_ += outcome.connected_satisfied;
    total_ += outcome.connected_total;
    outcomes_.push_back(std::move(outcome));
}

double ReliabilityAccumulator::reliability() const
{
    if (total_ == 0) {
        throw UndefinedMetric("reliability undefined: no connected vehicle was scored");
    }
    return static_cast<double>(satisfied_) / static_cast<double>(total_);
}

void ReliabilityAccumulator::merge(const ReliabilityAccumulator& other)
{
    for (const auto& o : other.outcomes_) {
        if (seen_.count(o.timestep) != 0) {
            throw ContractViolation("merge: duplicate timestep " + std::to_string(o.timestep));
        }
    }
    for (const auto& o : other.outcomes_) {
        seen_.insert(o.timestep);
    }
    satisfied_ += other.satisfied_;
    total_ += other.total_;
    outcomes_.insert(outcomes_.end(), other.outcomes_.begin(), other.outcomes_.end());
}

void write_outcomes_header(std::ostream& os)
{
    os << "timestep,strategy,connected_total,connected_satisfied,mean_hops\n";
}

void write_outcomes(std::ostream& os, const RunResult& result)
{
    const std::string strategy = to_string(result.strategy);
    for (const auto& o : result.outcomes) {
        os << o.timestep << ',' << strategy << ',' << o.connected_total << ',' << o.connected_satisfied << ','
           << format_double(o.mean_hops_of_valid_routes) << '\n';
    }
}

double reliability_from_detail_csv(std::istream& is)
{
    std::string line;
    std::getline(is, line);
    std::int64_t satisfied = 0;
    std::int64_t total = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto cols = split_csv_line(line);
        if (cols.size() != 5) {
            throw std::invalid_argument("detail row must have 5 columns");
        }
        total += static_cast<std::int64_t>(parse_double(cols[2]));
        satisfied += static_cast<std::int64_t>(parse_double(cols[3]));
    }
    if (total == 0) {
        throw UndefinedMetric("detail file has no connected vehicles");
    }
    return static_cast<double>(satisfied) / static_cast<double>(total);
}

}  // namespace mmv2x
