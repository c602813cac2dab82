#pragma once

#include "mmv2x/core.hpp"

#include <optional>
#include <span>

namespace mmv2x {

/// Oriented box resting on the ground plane (center.z == half_extents.z),
/// rotated by `yaw` about the vertical axis.
struct ObstacleBox {
    Vec3 center;
    Vec3 half_extents;
    double yaw = 0.0;
    std::optional<NodeId> owner;  // empty for static scenery

    static ObstacleBox from_vehicle(const VehicleState& v);
    static ObstacleBox on_ground(double x, double y, double yaw, Dimensions dims,
                                 std::optional<NodeId> owner = std::nullopt);
};

/// True iff the open segment (a, b) touches the closed box. Tangent contact
/// counts as an intersection.
bool segment_intersects_box(Vec3 a, Vec3 b, const ObstacleBox& box);

/// Number of boxes crossing the tx-rx segment, ignoring boxes owned by a node
/// in `exclude` (the link's own endpoints).
int blockage_count(Vec3 tx, Vec3 rx, std::span<const ObstacleBox> obstacles, std::span<const NodeId> exclude);

}  // namespace mmv2x
