#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace mmv2x {

/// One (timestep, vehicle) row of the snapshot trace:
/// timestep,sim_time,id,connected,x,y,heading,speed
struct TraceRecord {
    std::int64_t timestep = 0;
    double sim_time = 0.0;
    NodeId id;
    bool connected = true;
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
    double speed = 0.0;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

class TraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_trace_header(std::ostream& os);
void write_trace_record(std::ostream& os, const TraceRecord& record);
void write_trace_snapshot(std::ostream& os, const WorldSnapshot& snapshot);

TraceRecord to_record(std::int64_t timestep, double sim_time, const VehicleState& v);

/// Reads a trace with header. Throws TraceError with the line number on bad rows.
std::vector<TraceRecord> read_trace(std::istream& is);

/// Groups records into one snapshot per timestep from 0 to the last timestep
/// seen (steps without rows are empty). Bodies come from the config's car
/// class and the RSU from its configured height. Throws TraceError on
/// negative timesteps, duplicate (timestep, id) rows, or a vehicle whose
/// connectivity flag changes.
std::vector<WorldSnapshot> snapshots_from_trace(const std::vector<TraceRecord>& records,
                                                const ScenarioConfig& config);

}  // namespace mmv2x
