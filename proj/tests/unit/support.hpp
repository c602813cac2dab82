#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"
#include "mmv2x/topology.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

namespace testing {

/// Set by --extended; enables the long fuzz suites.
extern bool extended;

inline mmv2x::VehicleState car(std::uint32_t index, double x, double y, double heading = 0.0, bool connected = true)
{
    mmv2x::VehicleState v;
    v.id = mmv2x::NodeId::vehicle(index);
    v.position = {x, y, 0.0};
    v.heading = heading;
    v.connected = connected;
    return v;
}

inline mmv2x::VehicleState truck(std::uint32_t index, double x, double y, double heading = 0.0,
                                 bool connected = false)
{
    mmv2x::VehicleState v = car(index, x, y, heading, connected);
    v.dimensions = {8.0, 2.5, 3.2};
    v.antenna_height = 3.3;
    return v;
}

inline mmv2x::WorldSnapshot snapshot(std::int64_t t, std::vector<mmv2x::VehicleState> vehicles, double dt = 0.1)
{
    mmv2x::WorldSnapshot s;
    s.timestep = t;
    s.sim_time = static_cast<double>(t) * dt;
    std::sort(vehicles.begin(), vehicles.end(),
              [](const mmv2x::VehicleState& a, const mmv2x::VehicleState& b) { return a.id < b.id; });
    s.vehicles = std::move(vehicles);
    return s;
}

/// Graph over RSU + vehicles V1..V(n-1) built directly from edge weights.
/// Node i of the oracle graph is node i of the result (RSU is 0).
inline mmv2x::ConnectivityGraph graph_from(const oracle::Graph& g, std::int64_t t = 0)
{
    auto id = [](std::size_t i) {
        return i == 0 ? mmv2x::NodeId::rsu() : mmv2x::NodeId::vehicle(static_cast<std::uint32_t>(i));
    };
    std::vector<mmv2x::NodeId> nodes;
    for (std::size_t i = 0; i < g.n; ++i) {
        nodes.push_back(id(i));
    }
    std::vector<mmv2x::Edge> edges;
    for (const auto& e : g.edges) {
        mmv2x::Edge edge;
        edge.a = id(std::min(e.u, e.v));
        edge.b = id(std::max(e.u, e.v));
        edge.link = {10.0, 0, e.w, true};
        edges.push_back(edge);
    }
    return mmv2x::ConnectivityGraph(t, std::move(nodes), std::move(edges));
}

/// Random graph with weights on a 0.25 dB grid so that sums are exact and ties are common.
inline oracle::Graph random_graph(std::mt19937_64& rng, std::size_t n, double density)
{
    oracle::Graph g;
    g.n = n;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> grid(0, 40);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if (u(rng) < density) {
                g.edges.push_back({a, b, 80.0 + 0.25 * grid(rng)});
            }
        }
    }
    return g;
}

inline oracle::LinkRule rule_of(const mmv2x::ScenarioConfig& cfg)
{
    oracle::LinkRule r;
    for (const auto& c : cfg.channel.classes) {
        r.classes.push_back({c.max_blockers ? *c.max_blockers : -1, c.rho, c.gamma_dB});
    }
    r.atm_dB_per_km = cfg.channel.atmospheric_dB_per_km;
    r.max_range = cfg.channel.max_range_m;
    r.budget = cfg.link_budget_dB;
    return r;
}

inline std::vector<oracle::Body> bodies_of(const mmv2x::WorldSnapshot& s)
{
    std::vector<oracle::Body> out;
    for (const auto& v : s.vehicles) {
        out.push_back({static_cast<int>(v.id.index),
                       {v.position.x, v.position.y, v.position.z},
                       v.dimensions.length,
                       v.dimensions.width,
                       v.dimensions.height,
                       v.heading,
                       v.antenna_height,
                       v.connected});
    }
    return out;
}

/// Random scene of up to `max_vehicles` bodies within a 60 m square around the RSU.
inline mmv2x::WorldSnapshot random_scene(std::mt19937_64& rng, int max_vehicles)
{
    std::uniform_real_distribution<double> pos(-30.0, 30.0);
    std::uniform_real_distribution<double> ang(-3.14159, 3.14159);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> count(0, max_vehicles);
    std::vector<mmv2x::VehicleState> vs;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const bool heavy = u(rng) < 0.4;
        const bool connected = u(rng) < 0.6;
        const auto idx = static_cast<std::uint32_t>(i);
        vs.push_back(heavy ? truck(idx, pos(rng), pos(rng), ang(rng), connected)
                           : car(idx, pos(rng), pos(rng), ang(rng), connected));
    }
    return snapshot(0, std::move(vs));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("mmv2x-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace testing
