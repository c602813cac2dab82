#include "mmv2x/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmv2x {

ObstacleBox ObstacleBox::from_vehicle(const VehicleState& v)
{
    return on_ground(v.position.x, v.position.y, v.heading, v.dimensions, v.id);
}

ObstacleBox ObstacleBox::on_ground(double x, double y, double yaw, Dimensions dims, std::optional<NodeId> owner)
{
    ObstacleBox box;
    box.half_extents = {dims.length / 2.0, dims.width / 2.0, dims.height / 2.0};
    box.center = {x, y, box.half_extents.z};
    box.yaw = yaw;
    box.owner = owner;
    return box;
}

bool segment_intersects_box(Vec3 a, Vec3 b, const ObstacleBox& box)
{
    // Express both endpoints in the box frame.
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    auto to_local = [&](Vec3 p) {
        const Vec3 d = p - box.center;
        return Vec3{c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
    };
    const Vec3 la = to_local(a);
    const Vec3 lb = to_local(b);
    const double origin[3] = {la.x, la.y, la.z};
    const double dir[3] = {lb.x - la.x, lb.y - la.y, lb.z - la.z};
    const double half[3] = {box.half_extents.x, box.half_extents.y, box.half_extents.z};

    double t_enter = -std::numeric_limits<double>::infinity();
    double t_exit = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        if (dir[axis] == 0.0) {
            if (std::abs(origin[axis]) > half[axis]) {
                return false;
            }
            continue;
        }
        double t0 = (-half[axis] - origin[axis]) / dir[axis];
        double t1 = (half[axis] - origin[axis]) / dir[axis];
        if (t0 > t1) {
            std::swap(t0, t1);
        }
        t_enter = std::max(t_enter, t0);
        t_exit = std::min(t_exit, t1);
        if (t_enter > t_exit) {
            return false;
        }
    }
    // Open segment: parameter range (0, 1).
    return t_enter < 1.0 && t_exit > 0.0;
}

int blockage_count(Vec3 tx, Vec3 rx, std::span<const ObstacleBox> obstacles, std::span<const NodeId> exclude)
{
    int count = 0;
    for (const auto& box : obstacles) {
        if (box.owner && std::find(exclude.begin(), exclude.end(), *box.owner) != exclude.end()) {
            continue;
        }
        if (segment_intersects_box(tx, rx, box)) {
            ++count;
        }
    }
    return count;
}

}  // namespace mmv2x
