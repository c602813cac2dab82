#pragma once

#include "mmv2x/channel.hpp"
#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"
#include "mmv2x/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mmv2x {

/// Everything needed to turn a snapshot into links.
struct LinkModel {
    ChannelParams channel;
    double link_budget_dB = 110.0;
    std::vector<ObstacleBox> static_obstacles;

    static LinkModel from_config(const ScenarioConfig& config);
};

/// Undirected edge with a < b.
struct Edge {
    NodeId a;
    NodeId b;
    LinkAssessment link;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Immutable undirected graph of feasible mmWave links at one timestep.
/// Nodes are the RSU plus connected vehicles, kept sorted; edges sorted by (a, b).
class ConnectivityGraph {
public:
    struct Neighbor {
        std::size_t node;  // index into nodes()
        double path_loss_dB;
    };

    ConnectivityGraph() = default;

    /// Throws ContractViolation on self-edges, unknown endpoints, duplicate
    /// edges or infeasible links.
    ConnectivityGraph(std::int64_t timestep, std::vector<NodeId> nodes, std::vector<Edge> edges);

    std::int64_t timestep() const { return timestep_; }
    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<std::size_t> index_of(NodeId id) const;
    bool has_node(NodeId id) const { return index_of(id).has_value(); }
    const Edge* find_edge(NodeId u, NodeId v) const;
    bool has_edge(NodeId u, NodeId v) const { return find_edge(u, v) != nullptr; }

    /// Neighbors of nodes()[i], ascending by node id.
    const std::vector<Neighbor>& neighbors(std::size_t i) const { return adjacency_[i]; }

    friend bool operator==(const ConnectivityGraph& l, const ConnectivityGraph& r)
    {
        return l.timestep_ == r.timestep_ && l.nodes_ == r.nodes_ && l.edges_ == r.edges_;
    }

private:
    std::int64_t timestep_ = 0;
    std::vector<NodeId> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Neighbor>> adjacency_;
};

/// Obstacle list for a snapshot: every vehicle body plus static scenery.
std::vector<ObstacleBox> snapshot_obstacles(const WorldSnapshot& snapshot, const LinkModel& model);

/// Single-threaded reference: visits node pairs in order.
ConnectivityGraph build_topology_serial(const WorldSnapshot& snapshot, const LinkModel& model);

/// OpenMP kernel over node pairs. Produces the same graph as the serial
/// reference regardless of thread count.
ConnectivityGraph build_topology(const WorldSnapshot& snapshot, const LinkModel& model);

/// One line per edge: timestep,node_a,node_b,distance_m,blockers,path_loss_dB
void write_edge_list(std::ostream& os, const ConnectivityGraph& graph);
void write_edge_list_header(std::ostream& os);

}  // namespace mmv2x
