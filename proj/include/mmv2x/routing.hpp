#pragma once

#include "mmv2x/core.hpp"
#include "mmv2x/prediction.hpp"
#include "mmv2x/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace mmv2x {

/// Simple path from a vehicle to the RSU: hops.front() == source, hops.back() == RSU.
struct Route {
    NodeId source;
    std::vector<NodeId> hops;
    std::int64_t computed_for_timestep = 0;

    std::size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }
    friend bool operator==(const Route&, const Route&) = default;
};

/// Instructions issued to the connected vehicles alive at issuance.
struct RouteTable {
    std::map<NodeId, std::optional<Route>> assignments;
    std::int64_t issued_at_timestep = 0;

    const std::optional<Route>* lookup(NodeId vehicle) const;
    friend bool operator==(const RouteTable&, const RouteTable&) = default;
};

/// Minimum-cost route from `source` to the RSU.
///
/// Cost per hop is 1 + path_loss_dB / 10000, evaluated exactly as the pair
/// (hop count, summed path loss) since admissible losses stay below 10000 dB.
/// Remaining ties go to the lexicographically smallest node sequence.
/// Returns nullopt when the RSU is unreachable or needs more than `max_hops`.
/// Throws ContractViolation when `source` is not a graph node.
std::optional<Route> shortest_route(const ConnectivityGraph& graph, NodeId source,
                                    std::optional<int> max_hops = std::nullopt);

/// shortest_route for every demanding vehicle; the table is stamped with the graph timestep.
RouteTable route_all(const ConnectivityGraph& graph, std::span<const NodeId> demands,
                     std::optional<int> max_hops = std::nullopt);

/// Routes for a snapshot the twin holds right now. With control-plane latency
/// the caller passes an older snapshot than the one used for scoring.
RouteTable route_realtime(const WorldSnapshot& snapshot_at, std::span<const NodeId> demands, const LinkModel& model,
                          std::optional<int> max_hops = std::nullopt);

/// Same computation as route_realtime, run once per update epoch; callers keep
/// the table frozen until the next epoch.
RouteTable route_conventional(const WorldSnapshot& epoch_snapshot, std::span<const NodeId> demands,
                              const LinkModel& model, std::optional<int> max_hops = std::nullopt);

struct PlannedStep {
    std::int64_t timestep = 0;
    RouteTable table;
};

struct PredictivePlan {
    std::vector<PlannedStep> schedule;       // ascending timesteps
    std::vector<PredictedTrack> tracks;      // one per vehicle in the input snapshot
    std::vector<NodeId> fallback_vehicles;   // predicted by position hold
};

struct PredictiveRequest {
    std::int64_t now = 0;           // first timestep the plan applies to
    std::int64_t horizon_steps = 1;
    std::int64_t interval_steps = 1;
    double dt = 0.1;
    std::int64_t history_steps = 20;
    std::optional<int> max_hops;
};

/// Plans routes for timesteps [now, now + interval_steps) from the twin's
/// history, whose last snapshot may lag `now` by the control-plane latency.
/// Future worlds are synthesized from predicted tracks; timesteps beyond the
/// prediction horizon get no entry. Throws ContractViolation on empty history
/// or horizon < interval.
PredictivePlan route_predictive(std::span<const WorldSnapshot> history, const PredictiveRequest& request,
                                const TrajectoryPredictor& predictor, const LinkModel& model);

/// Snapshot at `timestep` with every vehicle moved to its predicted pose.
/// Vehicles without a prediction for that step keep their base pose.
WorldSnapshot synthesize_snapshot(const WorldSnapshot& base, std::span<const PredictedTrack> tracks,
                                  std::int64_t timestep, double dt);

/// True iff every node on the route exists and every consecutive hop is an
/// edge of the ground-truth graph. An absent route scores false.
bool score_route(const std::optional<Route>& route, const ConnectivityGraph& ground_truth);

/// "V3>V7>RSU"
std::string format_hops(const Route& route);

void write_route_dump_header(std::ostream& os);

/// timestep,vehicle,hops,valid per demanding vehicle.
void write_route_dump(std::ostream& os, std::int64_t timestep, std::span<const NodeId> demands,
                      const RouteTable* table, const ConnectivityGraph& ground_truth);

}  // namespace mmv2x
