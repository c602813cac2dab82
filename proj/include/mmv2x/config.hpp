#pragma once

#include "mmv2x/channel.hpp"
#include "mmv2x/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmv2x {

enum class Strategy { RealTime, Predictive, Conventional };
enum class PredictorKind { Hold, ConstantVelocity, ConstantTurnRate, Learned };

std::string to_string(Strategy s);
std::string to_string(PredictorKind k);
Strategy parse_strategy(const std::string& text);
PredictorKind parse_predictor(const std::string& text);

/// Four-arm intersection centered on the RSU. Arms extend `arm_length` from
/// the center; stop lines sit `lane_count * lane_width + junction_margin` out.
struct IntersectionGeometry {
    double arm_length = 100.0;
    int lane_count = 2;
    double lane_width = 3.5;
    double junction_margin = 6.0;

    double junction_half_size() const { return lane_count * lane_width + junction_margin; }
    friend bool operator==(const IntersectionGeometry&, const IntersectionGeometry&) = default;
};

struct SpeedParams {
    double min = 8.0;
    double max = 14.0;
    friend bool operator==(const SpeedParams&, const SpeedParams&) = default;
};

struct VehicleClass {
    Dimensions dimensions;
    double antenna_height = 1.6;
    friend bool operator==(const VehicleClass&, const VehicleClass&) = default;
};

/// Vehicle body mix and spacing rules for generated traffic.
struct FleetParams {
    VehicleClass car{{4.5, 1.8, 1.5}, 1.6};
    VehicleClass heavy{{8.0, 2.5, 3.2}, 3.3};
    double heavy_fraction = 0.2;
    double turn_fraction = 0.4;  // split evenly between left and right
    double min_gap = 7.0;         // center to center, same lane
    double bumper_clearance = 1.0;

    friend bool operator==(const FleetParams&, const FleetParams&) = default;
};

struct PredictionParams {
    double horizon = 2.0;
    double interval = 1.0;
    PredictorKind predictor = PredictorKind::ConstantVelocity;
    double history_window = 2.0;
    std::string learned_command;  // used by PredictorKind::Learned

    friend bool operator==(const PredictionParams&, const PredictionParams&) = default;
};

/// Ground-level box obstacle that is not a vehicle (building corner, kiosk).
struct StaticObstacle {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
    Dimensions dimensions;
    friend bool operator==(const StaticObstacle&, const StaticObstacle&) = default;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double duration = 600.0;
    double dt = 0.1;
    int vehicle_count = 30;
    double connected_fraction = 1.0;
    IntersectionGeometry intersection;
    SpeedParams speed;
    FleetParams fleet;
    ChannelParams channel;
    double link_budget_dB = 110.0;
    double rsu_height = 5.0;
    Strategy strategy = Strategy::RealTime;
    double latency_delta = 0.0;
    PredictionParams prediction;
    double conventional_update_interval = 5.0;
    std::optional<int> max_hops;  // empty = unbounded
    std::vector<StaticObstacle> static_obstacles;

    std::int64_t total_steps() const { return steps_floor(duration, dt); }
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct Violation {
    std::string field;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    /// True when a violation names `field` or a sub-field of it.
    bool mentions(const std::string& field) const;
    std::string to_string() const;
};

/// Checks every config invariant; failures are returned, never thrown.
ValidationReport validate_config(const ScenarioConfig& config);

/// Malformed input: bad syntax, wrong types, or unknown keys.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ScenarioConfig& config);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Stable 16-hex-digit digest of the serialized config.
std::string config_digest(const ScenarioConfig& config);

}  // namespace mmv2x
