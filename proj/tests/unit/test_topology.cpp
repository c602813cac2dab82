#include <doctest.h>

#include "mmv2x/topology.hpp"

#include "support.hpp"

#include <cmath>
#include <sstream>

using namespace mmv2x;
using testing::car;
using testing::snapshot;
using testing::truck;

namespace {

LinkModel default_model()
{
    return LinkModel::from_config(ScenarioConfig{});
}

/// Compares a graph with the brute-force edge list; distances and losses to 1e-9.
void check_against_oracle(const WorldSnapshot& s, const ScenarioConfig& cfg)
{
    const ConnectivityGraph g = build_topology(s, LinkModel::from_config(cfg));
    const auto expected = oracle::brute_force_edges(testing::bodies_of(s), {s.rsu_position.x, s.rsu_position.y,
                                                                           s.rsu_position.z},
                                                    testing::rule_of(cfg));
    REQUIRE(g.edges().size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const Edge& e = g.edges()[i];
        const auto id = [](int k) { return k < 0 ? NodeId::rsu() : NodeId::vehicle(static_cast<std::uint32_t>(k)); };
        CHECK(e.a == id(expected[i].a));
        CHECK(e.b == id(expected[i].b));
        CHECK(e.link.blockers == expected[i].blockers);
        CHECK(std::abs(e.link.distance_m - expected[i].distance) < 1e-9);
        CHECK(std::abs(e.link.path_loss_dB - expected[i].loss) < 1e-9);
    }
}

}  // namespace

TEST_CASE("no connected vehicles leaves the RSU alone")
{
    const auto g = build_topology(snapshot(0, {car(0, 10, 0, 0, false)}), default_model());
    CHECK(g.nodes() == std::vector<NodeId>{NodeId::rsu()});
    CHECK(g.edges().empty());
}

TEST_CASE("two nearby vehicles form a triangle with the RSU")
{
    const auto g = build_topology(snapshot(3, {car(1, 20, 0), car(2, 25, 0)}), default_model());
    CHECK(g.timestep() == 3);
    CHECK(g.nodes().size() == 3);
    CHECK(g.edges().size() == 3);
    CHECK(g.has_edge(NodeId::vehicle(1), NodeId::vehicle(2)));
    CHECK(g.has_edge(NodeId::vehicle(2), NodeId::rsu()));
    const Edge* e = g.find_edge(NodeId::vehicle(2), NodeId::vehicle(1));
    REQUIRE(e != nullptr);
    CHECK(e->a == NodeId::vehicle(1));
    CHECK(e->link.distance_m == doctest::Approx(5.0));
    check_against_oracle(snapshot(3, {car(1, 20, 0), car(2, 25, 0)}), ScenarioConfig{});
}

TEST_CASE("a truck on the RSU segment removes the RSU edge")
{
    // Sight line from (40, 0, 1.6) to (0, 0, 5) is about 2.45 m high above x = 30.
    const WorldSnapshot s = snapshot(0, {car(0, 40, 0), truck(1, 30, 0)});
    const auto g = build_topology(s, default_model());
    CHECK(g.has_node(NodeId::vehicle(0)));
    CHECK_FALSE(g.has_node(NodeId::vehicle(1)));
    CHECK_FALSE(g.has_edge(NodeId::vehicle(0), NodeId::rsu()));

    const auto clear = build_topology(snapshot(0, {car(0, 40, 0), truck(1, 30, 8)}), default_model());
    CHECK(clear.has_edge(NodeId::vehicle(0), NodeId::rsu()));
    check_against_oracle(s, ScenarioConfig{});
}

TEST_CASE("static scenery blocks links")
{
    ScenarioConfig cfg;
    cfg.static_obstacles.push_back({20, 0, 0, {2, 2, 10}});
    const auto g = build_topology(snapshot(0, {car(0, 40, 0)}), LinkModel::from_config(cfg));
    CHECK_FALSE(g.has_edge(NodeId::vehicle(0), NodeId::rsu()));
}

TEST_CASE("graph invariants over random scenes")
{
    std::mt19937_64 rng(77);
    const LinkModel model = default_model();
    for (int trial = 0; trial < 100; ++trial) {
        const WorldSnapshot s = testing::random_scene(rng, 10);
        const ConnectivityGraph g = build_topology(s, model);

        CHECK(g.nodes().size() == 1 + s.connected_ids().size());
        for (const auto& e : g.edges()) {
            CHECK(e.a < e.b);
            CHECK(e.link.feasible);
            CHECK(g.has_edge(e.b, e.a));
            const VehicleState* va = s.find(e.a);
            CHECK((e.a.is_rsu() || (va && va->connected)));
        }
        CHECK(g == build_topology_serial(s, model));

        // Dropping an unconnected body into the scene can only remove links.
        WorldSnapshot more = s;
        std::uniform_real_distribution<double> pos(-30, 30);
        more.vehicles.push_back(truck(99, pos(rng), pos(rng), 0.3, false));
        const ConnectivityGraph g2 = build_topology(more, model);
        CHECK(g2.nodes() == g.nodes());
        for (const auto& e : g2.edges()) {
            CHECK(g.has_edge(e.a, e.b));
        }
    }
}

TEST_CASE("topology matches the brute-force oracle on small scenes")
{
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 40; ++trial) {
        check_against_oracle(testing::random_scene(rng, 6), ScenarioConfig{});
    }
}

TEST_CASE("OpenMP kernel equals the serial reference on a crowded scene")
{
    // Large enough to take the parallel branch.
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> pos(-70, 70);
    std::vector<VehicleState> vs;
    for (std::uint32_t i = 0; i < 60; ++i) {
        vs.push_back(i % 5 == 0 ? truck(i, pos(rng), pos(rng), 0.1 * i, i % 2 == 0) : car(i, pos(rng), pos(rng), 0.2 * i));
    }
    const WorldSnapshot s = snapshot(9, vs);
    const LinkModel model = default_model();
    const auto g = build_topology(s, model);
    CHECK(g == build_topology_serial(s, model));
    CHECK(g.edges().size() > 100);
}

TEST_CASE("graph constructor enforces its invariants")
{
    const std::vector<NodeId> nodes{NodeId::vehicle(1), NodeId::rsu()};
    const LinkAssessment ok{10, 0, 90, true};
    CHECK_NOTHROW(ConnectivityGraph(0, nodes, {{NodeId::rsu(), NodeId::vehicle(1), ok}}));
    CHECK_THROWS_AS(ConnectivityGraph(0, nodes, {{NodeId::rsu(), NodeId::rsu(), ok}}), ContractViolation);
    CHECK_THROWS_AS(ConnectivityGraph(0, nodes, {{NodeId::rsu(), NodeId::vehicle(2), ok}}), ContractViolation);
    CHECK_THROWS_AS(ConnectivityGraph(0, nodes, {{NodeId::rsu(), NodeId::vehicle(1), {10, 0, 90, false}}}),
                    ContractViolation);
    CHECK_THROWS_AS(ConnectivityGraph(0, nodes,
                                      {{NodeId::rsu(), NodeId::vehicle(1), ok}, {NodeId::vehicle(1), NodeId::rsu(), ok}}),
                    ContractViolation);
    CHECK_THROWS_AS(ConnectivityGraph(0, {NodeId::rsu(), NodeId::rsu()}, {}), ContractViolation);

    const ConnectivityGraph g(0, nodes, {{NodeId::vehicle(1), NodeId::rsu(), ok}});
    CHECK(g.nodes().front() == NodeId::rsu());
    CHECK(g.edges().front().a == NodeId::rsu());
    REQUIRE(g.neighbors(0).size() == 1);
    CHECK(g.neighbors(0).front().node == 1);
}

TEST_CASE("edge list dump")
{
    std::ostringstream os;
    write_edge_list_header(os);
    write_edge_list(os, build_topology(snapshot(4, {car(1, 30, 40)}), default_model()));
    const std::string text = os.str();
    CHECK(text.starts_with("timestep,node_a,node_b,distance_m,blockers,path_loss_dB\n4,RSU,V1,"));
}
