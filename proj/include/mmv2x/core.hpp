#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mmv2x {

/// Raised when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(Vec3, Vec3) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double norm2d() const { return std::hypot(x, y); }
};

enum class NodeKind : std::uint8_t { Rsu = 0, Vehicle = 1 };

/// Node identity. The RSU orders before every vehicle; vehicles order by index.
struct NodeId {
    NodeKind kind = NodeKind::Vehicle;
    std::uint32_t index = 0;

    static constexpr NodeId rsu() { return {NodeKind::Rsu, 0}; }
    static constexpr NodeId vehicle(std::uint32_t i) { return {NodeKind::Vehicle, i}; }

    bool is_rsu() const { return kind == NodeKind::Rsu; }
    friend auto operator<=>(const NodeId&, const NodeId&) = default;

    /// "RSU" or "V<index>".
    std::string to_string() const;
    static NodeId parse(const std::string& text);
};

struct Dimensions {
    double length = 4.5;
    double width = 1.8;
    double height = 1.5;

    friend bool operator==(const Dimensions&, const Dimensions&) = default;
};

/// One vehicle at one timestep. `position` is the footprint center on the ground plane.
struct VehicleState {
    NodeId id;
    Vec3 position;
    double heading = 0.0;
    double speed = 0.0;
    Dimensions dimensions;
    double antenna_height = 1.6;
    bool connected = true;

    Vec3 antenna() const { return {position.x, position.y, position.z + antenna_height}; }
    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// The twin's view of the physical world at one timestep.
struct WorldSnapshot {
    std::int64_t timestep = 0;
    double sim_time = 0.0;
    std::vector<VehicleState> vehicles;  // sorted by id
    Vec3 rsu_position{0.0, 0.0, 5.0};

    const VehicleState* find(NodeId id) const;
    std::vector<NodeId> connected_ids() const;
};

/// Whole timesteps in `seconds`, rounded down.
std::int64_t steps_floor(double seconds, double dt);

/// Schedule length in timesteps: rounded down, never below one step.
std::int64_t schedule_steps(double seconds, double dt);

double wrap_angle(double radians);

}  // namespace mmv2x
