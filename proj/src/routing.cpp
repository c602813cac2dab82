#include "mmv2x/routing.hpp"

#include <algorithm>
#include <ostream>
#include <queue>

namespace mmv2x {

const std::optional<Route>* RouteTable::lookup(NodeId vehicle) const
{
    auto it = assignments.find(vehicle);
    return it == assignments.end() ? nullptr : &it->second;
}

namespace {

/// Dijkstra label. Node indices order like node ids because the graph keeps
/// its nodes sorted, so comparing index paths is comparing id sequences.
struct Label {
    std::size_t hops = 0;
    double path_loss_dB = 0.0;
    std::vector<std::size_t> path;

    friend bool operator<(const Label& l, const Label& r)
    {
        if (l.hops != r.hops) {
            return l.hops < r.hops;
        }
        if (l.path_loss_dB != r.path_loss_dB) {
            return l.path_loss_dB < r.path_loss_dB;
        }
        return l.path < r.path;
    }
};

}  // namespace

std::optional<Route> shortest_route(const ConnectivityGraph& graph, NodeId source, std::optional<int> max_hops)
{
    const auto src = graph.index_of(source);
    if (!src) {
        throw ContractViolation("shortest_route: source " + source.to_string() + " is not a graph node");
    }
    const auto target = graph.index_of(NodeId::rsu());
    if (!target) {
        return std::nullopt;
    }
    if (*src == *target) {
        throw ContractViolation("shortest_route: source must be a vehicle");
    }

    const std::size_t n = graph.nodes().size();
    std::vector<std::optional<Label>> best(n);
    std::vector<bool> done(n, false);
    auto later = [](const std::pair<Label, std::size_t>& l, const std::pair<Label, std::size_t>& r) {
        return r.first < l.first;
    };
    std::priority_queue<std::pair<Label, std::size_t>, std::vector<std::pair<Label, std::size_t>>, decltype(later)>
        open(later);

    best[*src] = Label{0, 0.0, {*src}};
    open.push({*best[*src], *src});
    while (!open.empty()) {
        auto [label, u] = open.top();
        open.pop();
        if (done[u] || best[u]->path != label.path) {
            continue;
        }
        done[u] = true;
        if (u == *target) {
            break;
        }
        for (const auto& nb : graph.neighbors(u)) {
            if (done[nb.node]) {
                continue;
            }
            Label next{label.hops + 1, label.path_loss_dB + nb.path_loss_dB, label.path};
            next.path.push_back(nb.node);
            if (!best[nb.node] || next < *best[nb.node]) {
                best[nb.node] = next;
                open.push({std::move(next), nb.node});
            }
        }
    }

    if (!done[*target]) {
        return std::nullopt;
    }
    const Label& found = *best[*target];
    if (max_hops && found.hops > static_cast<std::size_t>(*max_hops)) {
        return std::nullopt;
    }
    Route route;
    route.source = source;
    route.computed_for_timestep = graph.timestep();
    for (std::size_t idx : found.path) {
        route.hops.push_back(graph.nodes()[idx]);
    }
    return route;
}

RouteTable route_all(const ConnectivityGraph& graph, std::span<const NodeId> demands, std::optional<int> max_hops)
{
    RouteTable table;
    table.issued_at_timestep = graph.timestep();
    for (NodeId v : demands) {
        table.assignments.emplace(v, shortest_route(graph, v, max_hops));
    }
    return table;
}

RouteTable route_realtime(const WorldSnapshot& snapshot_at, std::span<const NodeId> demands, const LinkModel& model,
                          std::optional<int> max_hops)
{
    return route_all(build_topology(snapshot_at, model), demands, max_hops);
}

RouteTable route_conventional(const WorldSnapshot& epoch_snapshot, std::span<const NodeId> demands,
                              const LinkModel& model, std::optional<int> max_hops)
{
    return route_all(build_topology(epoch_snapshot, model), demands, max_hops);
}

WorldSnapshot synthesize_snapshot(const WorldSnapshot& base, std::span<const PredictedTrack> tracks,
                                  std::int64_t timestep, double dt)
{
    WorldSnapshot out = base;
    out.timestep = timestep;
    out.sim_time = static_cast<double>(timestep) * dt;
    for (const auto& track : tracks) {
        auto it = std::lower_bound(out.vehicles.begin(), out.vehicles.end(), track.vehicle,
                                   [](const VehicleState& v, NodeId key) { return v.id < key; });
        if (it == out.vehicles.end() || it->id != track.vehicle) {
            continue;
        }
        for (const auto& s : track.states) {
            if (s.timestep == timestep) {
                it->position = s.position;
                it->heading = s.heading;
                it->speed = s.speed;
                break;
            }
        }
    }
    return out;
}

PredictivePlan route_predictive(std::span<const WorldSnapshot> history, const PredictiveRequest& request,
                                const TrajectoryPredictor& predictor, const LinkModel& model)
{
    if (history.empty()) {
        throw ContractViolation("route_predictive: empty history");
    }
    if (request.horizon_steps < request.interval_steps || request.interval_steps < 1) {
        throw ContractViolation("route_predictive: horizon must cover the planning interval");
    }
    const WorldSnapshot& latest = history.back();
    const std::int64_t base = latest.timestep;
    const std::int64_t oldest = base - std::max<std::int64_t>(request.history_steps, 1);

    std::vector<std::vector<StateSample>> histories;
    histories.reserve(latest.vehicles.size());
    for (const auto& v : latest.vehicles) {
        std::vector<StateSample> samples;
        for (const auto& snap : history) {
            if (snap.timestep < oldest) {
                continue;
            }
            if (const VehicleState* s = snap.find(v.id)) {
                samples.push_back({snap.timestep, *s});
            }
        }
        histories.push_back(std::move(samples));
    }

    PredictivePlan plan;
    plan.tracks = predictor.predict_batch(histories, request.horizon_steps, request.dt);
    for (const auto& t : plan.tracks) {
        if (t.fallback) {
            plan.fallback_vehicles.push_back(t.vehicle);
        }
    }

    const std::vector<NodeId> demands = latest.connected_ids();
    for (std::int64_t step = request.now; step < request.now + request.interval_steps; ++step) {
        if (step < base || step - base > request.horizon_steps) {
            continue;
        }
        const WorldSnapshot world = step == base ? latest : synthesize_snapshot(latest, plan.tracks, step, request.dt);
        RouteTable table = route_all(build_topology(world, model), demands, request.max_hops);
        table.issued_at_timestep = base;
        plan.schedule.push_back({step, std::move(table)});
    }
    return plan;
}

bool score_route(const std::optional<Route>& route, const ConnectivityGraph& ground_truth)
{
    if (!route || route->hops.size() < 2) {
        return false;
    }
    for (NodeId n : route->hops) {
        if (!ground_truth.has_node(n)) {
            return false;
        }
    }
    for (std::size_t i = 0; i + 1 < route->hops.size(); ++i) {
        if (!ground_truth.has_edge(route->hops[i], route->hops[i + 1])) {
            return false;
        }
    }
    return true;
}

std::string format_hops(const Route& route)
{
    std::string out;
    for (std::size_t i = 0; i < route.hops.size(); ++i) {
        if (i > 0) {
            out += '>';
        }
        out += route.hops[i].to_string();
    }
    return out;
}

void write_route_dump_header(std::ostream& os)
{
    os << "timestep,vehicle,hops,valid\n";
}

void write_route_dump(std::ostream& os, std::int64_t timestep, std::span<const NodeId> demands,
                      const RouteTable* table, const ConnectivityGraph& ground_truth)
{
    for (NodeId v : demands) {
        const std::optional<Route>* entry = table ? table->lookup(v) : nullptr;
        const bool valid = entry && score_route(*entry, ground_truth);
        os << timestep << ',' << v.to_string() << ',' << (entry && *entry ? format_hops(**entry) : "-") << ','
           << (valid ? 1 : 0) << '\n';
    }
}

}  // namespace mmv2x
