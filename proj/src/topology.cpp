#include "mmv2x/topology.hpp"

#include "mmv2x/format.hpp"

#include <algorithm>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mmv2x {

LinkModel LinkModel::from_config(const ScenarioConfig& config)
{
    LinkModel model;
    model.channel = config.channel;
    model.link_budget_dB = config.link_budget_dB;
    for (const auto& o : config.static_obstacles) {
        model.static_obstacles.push_back(ObstacleBox::on_ground(o.x, o.y, o.yaw, o.dimensions));
    }
    return model;
}

ConnectivityGraph::ConnectivityGraph(std::int64_t timestep, std::vector<NodeId> nodes, std::vector<Edge> edges)
    : timestep_(timestep), nodes_(std::move(nodes)), edges_(std::move(edges))
{
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
        throw ContractViolation("duplicate graph node");
    }
    for (auto& e : edges_) {
        if (e.a == e.b) {
            throw ContractViolation("self edge on " + e.a.to_string());
        }
        if (e.b < e.a) {
            std::swap(e.a, e.b);
        }
        if (!has_node(e.a) || !has_node(e.b)) {
            throw ContractViolation("edge endpoint outside node set");
        }
        if (!e.link.feasible) {
            throw ContractViolation("infeasible link stored as edge");
        }
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& l, const Edge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
    for (std::size_t i = 1; i < edges_.size(); ++i) {
        if (edges_[i - 1].a == edges_[i].a && edges_[i - 1].b == edges_[i].b) {
            throw ContractViolation("duplicate edge");
        }
    }
    adjacency_.resize(nodes_.size());
    for (const auto& e : edges_) {
        const std::size_t ia = *index_of(e.a);
        const std::size_t ib = *index_of(e.b);
        adjacency_[ia].push_back({ib, e.link.path_loss_dB});
        adjacency_[ib].push_back({ia, e.link.path_loss_dB});
    }
    for (auto& list : adjacency_) {
        std::sort(list.begin(), list.end(), [](const Neighbor& l, const Neighbor& r) { return l.node < r.node; });
    }
}

std::optional<std::size_t> ConnectivityGraph::index_of(NodeId id) const
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - nodes_.begin());
}

const Edge* ConnectivityGraph::find_edge(NodeId u, NodeId v) const
{
    if (v < u) {
        std::swap(u, v);
    }
    auto it = std::lower_bound(edges_.begin(), edges_.end(), std::tie(u, v),
                               [](const Edge& e, const auto& key) { return std::tie(e.a, e.b) < key; });
    if (it == edges_.end() || it->a != u || it->b != v) {
        return nullptr;
    }
    return &*it;
}

std::vector<ObstacleBox> snapshot_obstacles(const WorldSnapshot& snapshot, const LinkModel& model)
{
    std::vector<ObstacleBox> out;
    out.reserve(snapshot.vehicles.size() + model.static_obstacles.size());
    for (const auto& v : snapshot.vehicles) {
        out.push_back(ObstacleBox::from_vehicle(v));
    }
    out.insert(out.end(), model.static_obstacles.begin(), model.static_obstacles.end());
    return out;
}

namespace {

struct Endpoint {
    NodeId id;
    Vec3 antenna;
};

std::vector<Endpoint> endpoints_of(const WorldSnapshot& snapshot)
{
    std::vector<Endpoint> out;
    out.push_back({NodeId::rsu(), snapshot.rsu_position});
    for (const auto& v : snapshot.vehicles) {
        if (v.connected) {
            out.push_back({v.id, v.antenna()});
        }
    }
    std::sort(out.begin(), out.end(), [](const Endpoint& l, const Endpoint& r) { return l.id < r.id; });
    return out;
}

/// Assessment for one candidate pair, or nullopt when the link is infeasible.
std::optional<LinkAssessment> evaluate_pair(const Endpoint& p, const Endpoint& q,
                                            const std::vector<ObstacleBox>& obstacles, const LinkModel& model)
{
    const Vec3 delta = p.antenna - q.antenna;
    if (delta.norm2d() > model.channel.max_range_m) {
        return std::nullopt;
    }
    if (delta.norm() == 0.0) {
        // Co-located antennas only arise from overlapping bodies; no usable link.
        return std::nullopt;
    }
    const NodeId exclude[2] = {p.id, q.id};
    const int blockers = blockage_count(p.antenna, q.antenna, obstacles, exclude);
    LinkAssessment link = assess_link(p.antenna, q.antenna, blockers, model.channel, model.link_budget_dB);
    if (!link.feasible) {
        return std::nullopt;
    }
    return link;
}

std::vector<NodeId> ids_of(const std::vector<Endpoint>& endpoints)
{
    std::vector<NodeId> ids;
    ids.reserve(endpoints.size());
    for (const auto& e : endpoints) {
        ids.push_back(e.id);
    }
    return ids;
}

}  // namespace

ConnectivityGraph build_topology_serial(const WorldSnapshot& snapshot, const LinkModel& model)
{
    const auto endpoints = endpoints_of(snapshot);
    const auto obstacles = snapshot_obstacles(snapshot, model);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        for (std::size_t j = i + 1; j < endpoints.size(); ++j) {
            if (auto link = evaluate_pair(endpoints[i], endpoints[j], obstacles, model)) {
                edges.push_back({endpoints[i].id, endpoints[j].id, *link});
            }
        }
    }
    return ConnectivityGraph(snapshot.timestep, ids_of(endpoints), std::move(edges));
}

ConnectivityGraph build_topology(const WorldSnapshot& snapshot, const LinkModel& model)
{
    const auto endpoints = endpoints_of(snapshot);
    const auto obstacles = snapshot_obstacles(snapshot, model);
    const auto n = static_cast<std::int64_t>(endpoints.size());
    const std::int64_t pair_count = n * (n - 1) / 2;

    // Pair k maps to (i, j) row-major over the upper triangle; each slot is
    // written by exactly one iteration, so the result is order independent.
    std::vector<std::optional<LinkAssessment>> slots(static_cast<std::size_t>(std::max<std::int64_t>(pair_count, 0)));
    std::vector<std::int64_t> row_start(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        row_start[static_cast<std::size_t>(i) + 1] = row_start[static_cast<std::size_t>(i)] + (n - 1 - i);
    }

#pragma omp parallel for schedule(dynamic, 8) if (pair_count > 512)
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = i + 1; j < n; ++j) {
            const auto k = static_cast<std::size_t>(row_start[static_cast<std::size_t>(i)] + (j - i - 1));
            slots[k] = evaluate_pair(endpoints[static_cast<std::size_t>(i)], endpoints[static_cast<std::size_t>(j)],
                                     obstacles, model);
        }
    }

    std::vector<Edge> edges;
    std::size_t k = 0;
    for (std::size_t i = 0; i < endpoints.size(); ++i) {
        for (std::size_t j = i + 1; j < endpoints.size(); ++j, ++k) {
            if (slots[k]) {
                edges.push_back({endpoints[i].id, endpoints[j].id, *slots[k]});
            }
        }
    }
    return ConnectivityGraph(snapshot.timestep, ids_of(endpoints), std::move(edges));
}

void write_edge_list_header(std::ostream& os)
{
    os << "timestep,node_a,node_b,distance_m,blockers,path_loss_dB\n";
}

void write_edge_list(std::ostream& os, const ConnectivityGraph& graph)
{
    for (const auto& e : graph.edges()) {
        os << graph.timestep() << ',' << e.a.to_string() << ',' << e.b.to_string() << ','
           << format_double(e.link.distance_m) << ',' << e.link.blockers << ',' << format_double(e.link.path_loss_dB)
           << '\n';
    }
}

}  // namespace mmv2x
