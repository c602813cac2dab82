// Serial reference vs OpenMP topology kernel on traffic snapshots of growing size.

#include "mmv2x/mobility.hpp"
#include "mmv2x/topology.hpp"

#include <benchmark/benchmark.h>

using namespace mmv2x;

namespace {

WorldSnapshot scene(int vehicles)
{
    ScenarioConfig cfg;
    cfg.seed = 11;
    cfg.vehicle_count = vehicles;
    cfg.connected_fraction = 0.5;
    TrafficState s = init_traffic(cfg);
    for (int i = 0; i < 300; ++i) {
        s = advance_traffic(std::move(s), cfg.dt).first;
    }
    return snapshot_of(s);
}

template <ConnectivityGraph (*Build)(const WorldSnapshot&, const LinkModel&)>
void topology(benchmark::State& state)
{
    const WorldSnapshot snap = scene(static_cast<int>(state.range(0)));
    const LinkModel model = LinkModel::from_config(ScenarioConfig{});
    for (auto _ : state) {
        benchmark::DoNotOptimize(Build(snap, model));
    }
    state.counters["vehicles"] = static_cast<double>(snap.vehicles.size());
}

}  // namespace

BENCHMARK_TEMPLATE(topology, build_topology_serial)->Arg(10)->Arg(30)->Arg(60)->Arg(120);
BENCHMARK_TEMPLATE(topology, build_topology)->Arg(10)->Arg(30)->Arg(60)->Arg(120);

BENCHMARK_MAIN();
