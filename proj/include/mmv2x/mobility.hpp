#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mmv2x {

enum class Arm { N, E, S, W };
enum class Maneuver { Straight, Left, Right };

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(Point2, Point2) = default;
};

struct Pose2 {
    Point2 position;
    double heading = 0.0;
};

/// Polyline from the spawn point of `entry_arm` through the junction to the
/// far end of the exit arm. The first `approach_length` meters run along the
/// entry lane and are shared by every plan using the same (entry_arm, lane).
struct RoutePlan {
    Arm entry_arm = Arm::N;
    Maneuver maneuver = Maneuver::Straight;
    int lane = 0;
    std::vector<Point2> waypoints;
    std::vector<double> cumulative;  // arc length at each waypoint
    double cruise_speed = 0.0;
    double approach_length = 0.0;

    double length() const { return cumulative.empty() ? 0.0 : cumulative.back(); }

    /// Pose at arc length `s`, clamped to the polyline. Heading follows the
    /// segment that starts at or before `s`.
    Pose2 pose_at(double s) const;
};

/// Right-hand traffic. Left turns use lane 0, right turns the outermost lane;
/// turns are quarter circles split into chords of at most `max_chord` meters.
RoutePlan make_route_plan(const IntersectionGeometry& geometry, Arm entry, Maneuver maneuver, int lane,
                          double cruise_speed, double max_chord = 1.0);

/// Seeded generator with a portable uniform draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }
    bool bernoulli(double p) { return uniform() < p; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

struct ActiveVehicle {
    VehicleState state;
    RoutePlan plan;
    double progress = 0.0;  // arc length along plan
};

/// Parameters the traffic model needs, copied from the scenario.
struct TrafficParams {
    IntersectionGeometry geometry;
    SpeedParams speed;
    FleetParams fleet;
    double connected_fraction = 1.0;
    int vehicle_count = 0;
    double dt = 0.1;
    double rsu_height = 5.0;

    static TrafficParams from_config(const ScenarioConfig& config);
};

struct TrafficState {
    TrafficParams params;
    std::vector<ActiveVehicle> active;  // sorted by id
    Rng rng{0};
    std::uint32_t next_vehicle_index = 0;
    int pending_spawns = 0;
    std::int64_t timestep = 0;
};

/// Populates the intersection at t = 0: vehicles are scattered at seeded
/// positions along seeded plans (respecting the gap rule); placements that
/// cannot be made become pending spawns at the entry arms.
TrafficState init_traffic(const ScenarioConfig& config);

WorldSnapshot snapshot_of(const TrafficState& state);

/// Moves every vehicle by speed*dt along its plan, clamped so that no vehicle
/// closes within the required gap of its same-lane leader; despawns vehicles
/// past their last waypoint and spawns replacements on seeded arms.
/// Throws ContractViolation if `dt` differs from the configured step.
std::pair<TrafficState, WorldSnapshot> advance_traffic(TrafficState state, double dt);

/// Center-to-center spacing two same-lane vehicles must keep.
double required_gap(const FleetParams& fleet, const VehicleState& a, const VehicleState& b);

/// True when `leader` is ahead of `follower` in the same lane: same entry arm
/// and lane, further along, and either on the same plan or still on the
/// shared approach.
bool leads(const ActiveVehicle& leader, const ActiveVehicle& follower);

}  // namespace mmv2x
