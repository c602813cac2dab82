#include "mmv2x/core.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>

namespace mmv2x {

std::string NodeId::to_string() const
{
    if (is_rsu()) {
        return "RSU";
    }
    return "V" + std::to_string(index);
}

NodeId NodeId::parse(const std::string& text)
{
    if (text == "RSU") {
        return rsu();
    }
    if (text.size() < 2 || text[0] != 'V') {
        throw std::invalid_argument("bad node id: " + text);
    }
    std::uint32_t value = 0;
    const char* first = text.data() + 1;
    const char* last = text.data() + text.size();
    const auto [end, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || end != last) {
        throw std::invalid_argument("bad node id: " + text);
    }
    return vehicle(value);
}

const VehicleState* WorldSnapshot::find(NodeId id) const
{
    auto it = std::lower_bound(vehicles.begin(), vehicles.end(), id,
                               [](const VehicleState& v, NodeId key) { return v.id < key; });
    if (it == vehicles.end() || it->id != id) {
        return nullptr;
    }
    return &*it;
}

std::vector<NodeId> WorldSnapshot::connected_ids() const
{
    std::vector<NodeId> out;
    for (const auto& v : vehicles) {
        if (v.connected) {
            out.push_back(v.id);
        }
    }
    return out;
}

std::int64_t steps_floor(double seconds, double dt)
{
    // 1e-9 absorbs representation error such as 0.3 / 0.1 = 2.9999999999999996.
    return static_cast<std::int64_t>(std::floor(seconds / dt + 1e-9));
}

std::int64_t schedule_steps(double seconds, double dt)
{
    return std::max<std::int64_t>(1, steps_floor(seconds, dt));
}

double wrap_angle(double radians)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(radians + std::numbers::pi, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    return r - std::numbers::pi;
}

}  // namespace mmv2x
