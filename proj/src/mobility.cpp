#include "mmv2x/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mmv2x {

namespace {

Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

Point2 outward(Arm arm)
{
    switch (arm) {
    case Arm::N: return {0.0, 1.0};
    case Arm::E: return {1.0, 0.0};
    case Arm::S: return {0.0, -1.0};
    case Arm::W: return {-1.0, 0.0};
    }
    return {};
}

Point2 right_of(Point2 d) { return {d.y, -d.x}; }

void push_distinct(std::vector<Point2>& pts, Point2 p)
{
    if (pts.empty() || std::hypot(p.x - pts.back().x, p.y - pts.back().y) > 1e-9) {
        pts.push_back(p);
    }
}

}  // namespace

Pose2 RoutePlan::pose_at(double s) const
{
    if (waypoints.size() < 2) {
        return {waypoints.empty() ? Point2{} : waypoints.front(), 0.0};
    }
    s = std::clamp(s, 0.0, length());
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), s);
    std::size_t seg = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
    seg = std::min(seg, waypoints.size() - 2);
    const Point2 a = waypoints[seg];
    const Point2 b = waypoints[seg + 1];
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double f = len > 0.0 ? (s - cumulative[seg]) / len : 0.0;
    return {{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)}, std::atan2(b.y - a.y, b.x - a.x)};
}

RoutePlan make_route_plan(const IntersectionGeometry& geometry, Arm entry, Maneuver maneuver, int lane,
                          double cruise_speed, double max_chord)
{
    const double arm = geometry.arm_length;
    const double half = geometry.junction_half_size();
    const double offset = (lane + 0.5) * geometry.lane_width;

    const Point2 u = outward(entry);
    const Point2 d = -1.0 * u;  // inbound direction
    const Point2 rd = right_of(d);
    Point2 exit_dir = d;
    if (maneuver == Maneuver::Right) {
        exit_dir = rd;
    } else if (maneuver == Maneuver::Left) {
        exit_dir = -1.0 * rd;
    }

    RoutePlan plan;
    plan.entry_arm = entry;
    plan.maneuver = maneuver;
    plan.lane = lane;
    plan.cruise_speed = cruise_speed;

    const Point2 spawn = arm * u + offset * rd;
    const Point2 stop = half * u + offset * rd;
    const Point2 exit_start = half * exit_dir + offset * right_of(exit_dir);
    const Point2 exit_end = arm * exit_dir + offset * right_of(exit_dir);

    push_distinct(plan.waypoints, spawn);
    push_distinct(plan.waypoints, stop);
    if (maneuver != Maneuver::Straight) {
        const bool right = maneuver == Maneuver::Right;
        const double radius = right ? half - offset : half + offset;
        const Point2 center = stop + (right ? radius : -radius) * rd;
        const double start = std::atan2(stop.y - center.y, stop.x - center.x);
        const double sweep = right ? -std::numbers::pi / 2.0 : std::numbers::pi / 2.0;
        const double arc = radius * std::numbers::pi / 2.0;
        const int pieces = std::max(1, static_cast<int>(std::ceil(arc / max_chord)));
        for (int i = 1; i < pieces; ++i) {
            const double a = start + sweep * i / pieces;
            push_distinct(plan.waypoints, {center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
        }
    }
    push_distinct(plan.waypoints, exit_start);
    push_distinct(plan.waypoints, exit_end);

    plan.cumulative.push_back(0.0);
    for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
        const Point2 a = plan.waypoints[i - 1];
        const Point2 b = plan.waypoints[i];
        plan.cumulative.push_back(plan.cumulative.back() + std::hypot(b.x - a.x, b.y - a.y));
    }
    plan.approach_length = arm - half;
    return plan;
}

TrafficParams TrafficParams::from_config(const ScenarioConfig& config)
{
    return {config.intersection, config.speed,   config.fleet,     config.connected_fraction,
            config.vehicle_count, config.dt,      config.rsu_height};
}

double required_gap(const FleetParams& fleet, const VehicleState& a, const VehicleState& b)
{
    return std::max(fleet.min_gap, 0.5 * (a.dimensions.length + b.dimensions.length) + fleet.bumper_clearance);
}

bool leads(const ActiveVehicle& leader, const ActiveVehicle& follower)
{
    if (leader.state.id == follower.state.id || leader.plan.entry_arm != follower.plan.entry_arm
        || leader.plan.lane != follower.plan.lane) {
        return false;
    }
    if (leader.progress < follower.progress
        || (leader.progress == follower.progress && follower.state.id < leader.state.id)) {
        return false;
    }
    return leader.plan.maneuver == follower.plan.maneuver || leader.progress < leader.plan.approach_length;
}

namespace {

void place(ActiveVehicle& v)
{
    const Pose2 pose = v.plan.pose_at(v.progress);
    v.state.position = {pose.position.x, pose.position.y, 0.0};
    v.state.heading = pose.heading;
}

/// Draws a fresh vehicle (plan, body, connectivity) without assigning an id.
ActiveVehicle draw_vehicle(const TrafficParams& p, Rng& rng)
{
    const auto arm = static_cast<Arm>(rng.below(4));
    Maneuver maneuver = Maneuver::Straight;
    if (rng.bernoulli(p.fleet.turn_fraction)) {
        maneuver = rng.bernoulli(0.5) ? Maneuver::Left : Maneuver::Right;
    }
    const auto lanes = static_cast<std::uint64_t>(p.geometry.lane_count);
    int lane = static_cast<int>(rng.below(lanes));
    if (maneuver == Maneuver::Left) {
        lane = 0;
    } else if (maneuver == Maneuver::Right) {
        lane = p.geometry.lane_count - 1;
    }
    const double cruise = rng.uniform(p.speed.min, p.speed.max);
    const bool heavy = rng.bernoulli(p.fleet.heavy_fraction);
    const bool connected = rng.bernoulli(p.connected_fraction);

    ActiveVehicle v;
    v.plan = make_route_plan(p.geometry, arm, maneuver, lane, cruise);
    const VehicleClass& body = heavy ? p.fleet.heavy : p.fleet.car;
    v.state.dimensions = body.dimensions;
    v.state.antenna_height = body.antenna_height;
    v.state.connected = connected;
    v.state.speed = cruise;
    return v;
}

bool conflicts(const TrafficParams& p, const ActiveVehicle& candidate, const std::vector<ActiveVehicle>& active)
{
    for (const auto& other : active) {
        const bool other_leads = leads(other, candidate);
        if (!other_leads && !leads(candidate, other)) {
            continue;
        }
        if (std::abs(other.progress - candidate.progress) < required_gap(p.fleet, candidate.state, other.state)) {
            return true;
        }
    }
    return false;
}

void insert_sorted(std::vector<ActiveVehicle>& active, ActiveVehicle v)
{
    auto it = std::lower_bound(active.begin(), active.end(), v.state.id,
                               [](const ActiveVehicle& a, NodeId key) { return a.state.id < key; });
    active.insert(it, std::move(v));
}

/// One spawn attempt at the entry of a seeded arm. Returns false when the
/// entry lane is occupied.
bool try_spawn(TrafficState& state)
{
    ActiveVehicle v = draw_vehicle(state.params, state.rng);
    v.progress = 0.0;
    v.state.id = NodeId::vehicle(state.next_vehicle_index);
    if (conflicts(state.params, v, state.active)) {
        return false;
    }
    ++state.next_vehicle_index;
    place(v);
    insert_sorted(state.active, std::move(v));
    return true;
}

}  // namespace

TrafficState init_traffic(const ScenarioConfig& config)
{
    constexpr int kPlacementAttempts = 50;
    TrafficState state;
    state.params = TrafficParams::from_config(config);
    state.rng = Rng(config.seed);
    for (int i = 0; i < config.vehicle_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
            ActiveVehicle v = draw_vehicle(state.params, state.rng);
            v.progress = state.rng.uniform(0.0, v.plan.length());
            v.state.id = NodeId::vehicle(state.next_vehicle_index);
            if (!conflicts(state.params, v, state.active)) {
                ++state.next_vehicle_index;
                place(v);
                insert_sorted(state.active, std::move(v));
                placed = true;
            }
        }
        if (!placed) {
            ++state.pending_spawns;
        }
    }
    return state;
}

WorldSnapshot snapshot_of(const TrafficState& state)
{
    WorldSnapshot snap;
    snap.timestep = state.timestep;
    snap.sim_time = static_cast<double>(state.timestep) * state.params.dt;
    snap.rsu_position = {0.0, 0.0, state.params.rsu_height};
    snap.vehicles.reserve(state.active.size());
    for (const auto& v : state.active) {
        snap.vehicles.push_back(v.state);
    }
    return snap;
}

std::pair<TrafficState, WorldSnapshot> advance_traffic(TrafficState state, double dt)
{
    if (dt != state.params.dt) {
        throw ContractViolation("advance_traffic: dt differs from the configured timestep");
    }
    auto& active = state.active;

    // Leaders first, so each follower clamps against its leader's new position.
    std::vector<std::size_t> order(active.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        if (active[l].progress != active[r].progress) {
            return active[l].progress > active[r].progress;
        }
        return active[l].state.id < active[r].state.id;
    });

    std::vector<bool> moved(active.size(), false);
    for (std::size_t idx : order) {
        ActiveVehicle& v = active[idx];
        const double before = v.progress;
        double next = before + v.plan.cruise_speed * dt;
        for (std::size_t other = 0; other < active.size(); ++other) {
            if (!moved[other] || !leads(active[other], v)) {
                continue;
            }
            next = std::min(next, active[other].progress - required_gap(state.params.fleet, v.state, active[other].state));
        }
        v.progress = std::max(next, before);
        v.state.speed = (v.progress - before) / dt;
        moved[idx] = true;
    }

    int despawned = 0;
    std::erase_if(active, [&](const ActiveVehicle& v) {
        if (v.progress >= v.plan.length()) {
            ++despawned;
            return true;
        }
        return false;
    });
    for (auto& v : active) {
        place(v);
    }

    state.pending_spawns += despawned;
    int still_pending = 0;
    for (int i = 0; i < state.pending_spawns; ++i) {
        if (!try_spawn(state)) {
            ++still_pending;
        }
    }
    state.pending_spawns = still_pending;
    ++state.timestep;

    WorldSnapshot snap = snapshot_of(state);
    return {std::move(state), std::move(snap)};
}

}  // namespace mmv2x
