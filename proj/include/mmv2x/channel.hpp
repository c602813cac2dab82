#pragma once

#include "mmv2x/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mmv2x {

/// Path-loss parameters for links with up to `max_blockers` occluders.
/// An empty `max_blockers` marks the catch-all last class.
struct BlockageClass {
    std::optional<int> max_blockers;
    double rho = 2.0;
    double gamma_dB = 68.0;

    friend bool operator==(const BlockageClass&, const BlockageClass&) = default;
};

struct ChannelParams {
    std::vector<BlockageClass> classes = default_classes();
    double atmospheric_dB_per_km = 15.0;
    double max_range_m = 150.0;

    /// LOS rho=2, gamma=68 dB (60 GHz free space at 1 m), then +16 dB per
    /// blocker for 1, 2 and 3+ blockers.
    static std::vector<BlockageClass> default_classes();

    const BlockageClass& class_for(int blockers) const;

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

/// Empty when `params` is usable. Messages are prefixed with the field path
/// relative to the channel section.
std::vector<std::pair<std::string, std::string>> channel_violations(const ChannelParams& params);

/// 10*rho*log10(d) + gamma + atm*d/1000 with (rho, gamma) picked by blocker count.
/// Throws std::domain_error for d <= 0 or a negative blocker count.
double path_loss(double distance_m, int blockers, const ChannelParams& params);

struct LinkAssessment {
    double distance_m = 0.0;
    int blockers = 0;
    double path_loss_dB = 0.0;
    bool feasible = false;

    friend bool operator==(const LinkAssessment&, const LinkAssessment&) = default;
};

/// Throws std::domain_error when tx and rx coincide.
LinkAssessment assess_link(Vec3 tx, Vec3 rx, int blockers, const ChannelParams& params, double budget_dB);

}  // namespace mmv2x
