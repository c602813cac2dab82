#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/metrics.hpp"
#include "mmv2x/routing.hpp"
#include "mmv2x/topology.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mmv2x {

/// The routing-side knobs of a scenario. Several variants can share one
/// traffic realization.
struct StrategySettings {
    Strategy strategy = Strategy::RealTime;
    double latency_delta = 0.0;
    std::optional<int> max_hops;
    PredictionParams prediction;
    double conventional_update_interval = 5.0;

    static StrategySettings from_config(const ScenarioConfig& config);
};

/// Optional observers, called in timestep order.
struct SimulationHooks {
    std::function<void(const WorldSnapshot&)> on_snapshot;
    std::function<void(const ConnectivityGraph&)> on_ground_truth;
    /// table is null when the strategy has no instructions for this step.
    std::function<void(std::size_t variant, std::int64_t timestep, std::span<const NodeId> demands,
                       const RouteTable* table, const ConnectivityGraph& ground_truth)>
        on_routes;
};

/// Scores every variant against one traffic realization generated from
/// `world` (its own strategy fields are ignored). Each step: advance traffic,
/// build the ground-truth topology, let each strategy produce or reuse its
/// instructions, and score them. Results come back in variant order.
///
/// Twin inputs lag by latency_delta (rounded down to whole steps, clamped at
/// the first snapshot). RealTime recomputes every step; Predictive replans
/// every prediction.interval; Conventional rebuilds every
/// conventional_update_interval from the current world and ignores latency.
std::vector<RunResult> simulate(const ScenarioConfig& world, std::span<const StrategySettings> variants,
                                const SimulationHooks& hooks = {});

/// Same loop driven by recorded snapshots (timestep i at index i).
std::vector<RunResult> simulate_replay(std::span<const WorldSnapshot> snapshots, const ScenarioConfig& world,
                                       std::span<const StrategySettings> variants, const SimulationHooks& hooks = {});

/// simulate() with the strategy the config names.
RunResult run_single(const ScenarioConfig& config, const SimulationHooks& hooks = {});

}  // namespace mmv2x
