#include "mmv2x/simulation.hpp"

#include "mmv2x/mobility.hpp"
#include "mmv2x/prediction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>

namespace mmv2x {

StrategySettings StrategySettings::from_config(const ScenarioConfig& config)
{
    return {config.strategy, config.latency_delta, config.max_hops, config.prediction,
            config.conventional_update_interval};
}

namespace {

struct PendingCheck {
    NodeId vehicle;
    Vec3 predicted;
};

/// Per-variant mutable state for one run.
class StrategyRunner {
public:
    StrategyRunner(const StrategySettings& s, double dt, const LinkModel& model) : settings_(s), dt_(dt), model_(model)
    {
        latency_steps_ = steps_floor(s.latency_delta, dt);
        interval_steps_ = schedule_steps(s.prediction.interval, dt);
        horizon_steps_ = schedule_steps(s.prediction.horizon, dt);
        history_steps_ = schedule_steps(s.prediction.history_window, dt);
        conventional_steps_ = schedule_steps(s.conventional_update_interval, dt);
        if (s.strategy == Strategy::Predictive) {
            predictor_ = make_predictor(s.prediction);
        }
    }

    /// How many past steps this runner reads from the buffers.
    std::int64_t lookback() const
    {
        return latency_steps_ + (settings_.strategy == Strategy::Predictive ? history_steps_ : 0);
    }

    /// Instructions in force at timestep t; null when none exist.
    const RouteTable* instructions(std::int64_t t, const std::deque<WorldSnapshot>& snapshots,
                                   const std::deque<ConnectivityGraph>& graphs)
    {
        switch (settings_.strategy) {
        case Strategy::RealTime: {
            const std::int64_t k = std::max<std::int64_t>(0, t - latency_steps_);
            const WorldSnapshot& seen = at(snapshots, k);
            const auto demands = seen.connected_ids();
            current_ = route_all(at(graphs, k), demands, settings_.max_hops);
            return &*current_;
        }
        case Strategy::Conventional: {
            if (t % conventional_steps_ == 0) {
                const WorldSnapshot& seen = at(snapshots, t);
                const auto demands = seen.connected_ids();
                current_ = route_all(at(graphs, t), demands, settings_.max_hops);
            }
            return current_ ? &*current_ : nullptr;
        }
        case Strategy::Predictive: {
            if (t % interval_steps_ == 0) {
                plan(t, snapshots);
            }
            auto it = schedule_.find(t);
            return it == schedule_.end() ? nullptr : &it->second;
        }
        }
        return nullptr;
    }

    /// Compares predictions due at this step with where vehicles really are.
    void check_predictions(const WorldSnapshot& truth)
    {
        auto it = checks_.find(truth.timestep);
        if (it == checks_.end()) {
            return;
        }
        for (const auto& c : it->second) {
            if (const VehicleState* v = truth.find(c.vehicle)) {
                error_sum_ += (v->position - c.predicted).norm2d();
                ++error_count_;
            }
        }
        checks_.erase(it);
    }

    ReliabilityAccumulator accumulator;

    std::optional<double> prediction_error_mean() const
    {
        if (settings_.strategy != Strategy::Predictive || error_count_ == 0) {
            return std::nullopt;
        }
        return error_sum_ / static_cast<double>(error_count_);
    }

    std::int64_t fallbacks() const { return fallbacks_; }
    const StrategySettings& settings() const { return settings_; }

private:
    template <typename T>
    static const T& at(const std::deque<T>& buffer, std::int64_t timestep)
    {
        // Buffers hold consecutive timesteps ending at the current one.
        const std::int64_t newest = timestep_of(buffer.back());
        const auto offset = static_cast<std::size_t>(newest - timestep);
        return buffer[buffer.size() - 1 - offset];
    }
    static std::int64_t timestep_of(const WorldSnapshot& s) { return s.timestep; }
    static std::int64_t timestep_of(const ConnectivityGraph& g) { return g.timestep(); }

    void plan(std::int64_t t, const std::deque<WorldSnapshot>& snapshots)
    {
        const std::int64_t k = std::max<std::int64_t>(0, t - latency_steps_);
        const std::int64_t first = std::max<std::int64_t>({0, k - history_steps_, timestep_of(snapshots.front())});
        std::vector<WorldSnapshot> history;
        for (std::int64_t i = first; i <= k; ++i) {
            history.push_back(at(snapshots, i));
        }
        PredictiveRequest request;
        request.now = t;
        request.horizon_steps = horizon_steps_;
        request.interval_steps = interval_steps_;
        request.dt = dt_;
        request.history_steps = history_steps_;
        request.max_hops = settings_.max_hops;
        PredictivePlan p = route_predictive(history, request, *predictor_, model_);

        schedule_.clear();
        for (auto& step : p.schedule) {
            schedule_.emplace(step.timestep, std::move(step.table));
        }
        fallbacks_ += static_cast<std::int64_t>(p.fallback_vehicles.size());
        for (const auto& track : p.tracks) {
            for (const auto& s : track.states) {
                if (s.timestep >= t && s.timestep < t + interval_steps_) {
                    checks_[s.timestep].push_back({track.vehicle, s.position});
                }
            }
        }
    }

    StrategySettings settings_;
    double dt_;
    const LinkModel& model_;
    std::int64_t latency_steps_ = 0;
    std::int64_t interval_steps_ = 1;
    std::int64_t horizon_steps_ = 1;
    std::int64_t history_steps_ = 1;
    std::int64_t conventional_steps_ = 1;
    std::unique_ptr<TrajectoryPredictor> predictor_;
    std::optional<RouteTable> current_;
    std::map<std::int64_t, RouteTable> schedule_;
    std::map<std::int64_t, std::vector<PendingCheck>> checks_;
    double error_sum_ = 0.0;
    std::int64_t error_count_ = 0;
    std::int64_t fallbacks_ = 0;
};

template <typename NextSnapshot>
std::vector<RunResult> run_loop(NextSnapshot&& next, std::int64_t steps, const ScenarioConfig& world,
                                std::span<const StrategySettings> variants, const SimulationHooks& hooks)
{
    const LinkModel model = LinkModel::from_config(world);
    std::vector<StrategyRunner> runners;
    runners.reserve(variants.size());
    std::int64_t lookback = 0;
    for (const auto& v : variants) {
        runners.emplace_back(v, world.dt, model);
        lookback = std::max(lookback, runners.back().lookback());
    }

    std::deque<WorldSnapshot> snapshots;
    std::deque<ConnectivityGraph> graphs;
    for (std::int64_t t = 0; t < steps; ++t) {
        snapshots.push_back(next(t));
        graphs.push_back(build_topology(snapshots.back(), model));
        while (static_cast<std::int64_t>(snapshots.size()) > lookback + 1) {
            snapshots.pop_front();
            graphs.pop_front();
        }
        const WorldSnapshot& truth = snapshots.back();
        const ConnectivityGraph& truth_graph = graphs.back();
        if (hooks.on_snapshot) {
            hooks.on_snapshot(truth);
        }
        if (hooks.on_ground_truth) {
            hooks.on_ground_truth(truth_graph);
        }
        const std::vector<NodeId> demands = truth.connected_ids();

        for (std::size_t i = 0; i < runners.size(); ++i) {
            StrategyRunner& runner = runners[i];
            const RouteTable* table = runner.instructions(t, snapshots, graphs);
            runner.check_predictions(truth);

            TimestepOutcome outcome;
            outcome.timestep = t;
            outcome.connected_total = static_cast<std::int64_t>(demands.size());
            std::size_t hop_sum = 0;
            for (NodeId v : demands) {
                const std::optional<Route>* entry = table ? table->lookup(v) : nullptr;
                const bool ok = entry && score_route(*entry, truth_graph);
                outcome.per_vehicle.emplace(v, ok);
                if (ok) {
                    ++outcome.connected_satisfied;
                    hop_sum += (*entry)->hop_count();
                }
            }
            if (outcome.connected_satisfied > 0) {
                outcome.mean_hops_of_valid_routes =
                    static_cast<double>(hop_sum) / static_cast<double>(outcome.connected_satisfied);
            }
            if (hooks.on_routes) {
                hooks.on_routes(i, t, demands, table, truth_graph);
            }
            runner.accumulator.record(std::move(outcome));
        }
    }

    const std::string digest = config_digest(world);
    std::vector<RunResult> results;
    for (auto& runner : runners) {
        RunResult r;
        r.config_digest = digest;
        r.strategy = runner.settings().strategy;
        r.seed = world.seed;
        r.vehicle_count = world.vehicle_count;
        r.connected_fraction = world.connected_fraction;
        r.satisfied_sum = runner.accumulator.satisfied_sum();
        r.total_sum = runner.accumulator.total_sum();
        if (r.total_sum > 0) {
            r.reliability = runner.accumulator.reliability();
        }
        r.outcomes = runner.accumulator.outcomes();
        r.prediction_error_mean = runner.prediction_error_mean();
        r.predictor_fallbacks = runner.fallbacks();
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace

std::vector<RunResult> simulate(const ScenarioConfig& world, std::span<const StrategySettings> variants,
                                const SimulationHooks& hooks)
{
    TrafficState traffic = init_traffic(world);
    auto next = [&](std::int64_t t) {
        if (t == 0) {
            return snapshot_of(traffic);
        }
        auto [state, snap] = advance_traffic(std::move(traffic), world.dt);
        traffic = std::move(state);
        return snap;
    };
    return run_loop(next, world.total_steps(), world, variants, hooks);
}

std::vector<RunResult> simulate_replay(std::span<const WorldSnapshot> snapshots, const ScenarioConfig& world,
                                       std::span<const StrategySettings> variants, const SimulationHooks& hooks)
{
    auto next = [&](std::int64_t t) { return snapshots[static_cast<std::size_t>(t)]; };
    return run_loop(next, static_cast<std::int64_t>(snapshots.size()), world, variants, hooks);
}

RunResult run_single(const ScenarioConfig& config, const SimulationHooks& hooks)
{
    const StrategySettings settings = StrategySettings::from_config(config);
    return simulate(config, std::span<const StrategySettings>(&settings, 1), hooks).front();
}

}  // namespace mmv2x
