#include "mmv2x/trace_io.hpp"

#include "mmv2x/format.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace mmv2x {

namespace {
constexpr const char* kHeader = "timestep,sim_time,id,connected,x,y,heading,speed";
}

void write_trace_header(std::ostream& os)
{
    os << kHeader << '\n';
}

void write_trace_record(std::ostream& os, const TraceRecord& r)
{
    os << r.timestep << ',' << format_double(r.sim_time) << ',' << r.id.to_string() << ',' << (r.connected ? 1 : 0)
       << ',' << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.heading) << ','
       << format_double(r.speed) << '\n';
}

TraceRecord to_record(std::int64_t timestep, double sim_time, const VehicleState& v)
{
    return {timestep, sim_time, v.id, v.connected, v.position.x, v.position.y, v.heading, v.speed};
}

void write_trace_snapshot(std::ostream& os, const WorldSnapshot& snapshot)
{
    for (const auto& v : snapshot.vehicles) {
        write_trace_record(os, to_record(snapshot.timestep, snapshot.sim_time, v));
    }
}

std::vector<TraceRecord> read_trace(std::istream& is)
{
    std::vector<TraceRecord> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) {
                throw TraceError("trace line 1: expected header '" + std::string(kHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto cols = split_csv_line(line);
        if (cols.size() != 8) {
            throw TraceError("trace line " + std::to_string(line_no) + ": expected 8 columns");
        }
        try {
            TraceRecord r;
            const double ts = parse_double(cols[0]);
            r.timestep = static_cast<std::int64_t>(ts);
            if (static_cast<double>(r.timestep) != ts) {
                throw std::invalid_argument("timestep must be an integer");
            }
            r.sim_time = parse_double(cols[1]);
            r.id = NodeId::parse(std::string(cols[2]));
            if (r.id.is_rsu()) {
                throw std::invalid_argument("RSU cannot appear as a vehicle");
            }
            if (cols[3] != "0" && cols[3] != "1") {
                throw std::invalid_argument("connected must be 0 or 1");
            }
            r.connected = cols[3] == "1";
            r.x = parse_double(cols[4]);
            r.y = parse_double(cols[5]);
            r.heading = parse_double(cols[6]);
            r.speed = parse_double(cols[7]);
            out.push_back(r);
        } catch (const std::exception& e) {
            throw TraceError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) {
        throw TraceError("trace is empty");
    }
    return out;
}

std::vector<WorldSnapshot> snapshots_from_trace(const std::vector<TraceRecord>& records, const ScenarioConfig& config)
{
    std::int64_t last = -1;
    for (const auto& r : records) {
        if (r.timestep < 0) {
            throw TraceError("negative timestep in trace");
        }
        last = std::max(last, r.timestep);
    }
    std::vector<WorldSnapshot> out(static_cast<std::size_t>(last + 1));
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t].timestep = static_cast<std::int64_t>(t);
        out[t].sim_time = static_cast<double>(t) * config.dt;
        out[t].rsu_position = {0.0, 0.0, config.rsu_height};
    }
    std::map<NodeId, bool> connectivity;
    for (const auto& r : records) {
        auto [it, inserted] = connectivity.emplace(r.id, r.connected);
        if (!inserted && it->second != r.connected) {
            throw TraceError("vehicle " + r.id.to_string() + " changes connectivity");
        }
        WorldSnapshot& snap = out[static_cast<std::size_t>(r.timestep)];
        snap.sim_time = r.sim_time;
        VehicleState v;
        v.id = r.id;
        v.position = {r.x, r.y, 0.0};
        v.heading = r.heading;
        v.speed = r.speed;
        v.dimensions = config.fleet.car.dimensions;
        v.antenna_height = config.fleet.car.antenna_height;
        v.connected = r.connected;
        snap.vehicles.push_back(v);
    }
    for (auto& snap : out) {
        std::sort(snap.vehicles.begin(), snap.vehicles.end(),
                  [](const VehicleState& l, const VehicleState& r) { return l.id < r.id; });
        for (std::size_t i = 1; i < snap.vehicles.size(); ++i) {
            if (snap.vehicles[i - 1].id == snap.vehicles[i].id) {
                throw TraceError("duplicate vehicle " + snap.vehicles[i].id.to_string() + " at timestep "
                                 + std::to_string(snap.timestep));
            }
        }
    }
    return out;
}

}  // namespace mmv2x
