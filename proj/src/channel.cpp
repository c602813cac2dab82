#include "mmv2x/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mmv2x {

std::vector<BlockageClass> ChannelParams::default_classes()
{
    return {
        {0, 2.0, 68.0},
        {1, 2.0, 84.0},
        {2, 2.0, 100.0},
        {std::nullopt, 2.0, 116.0},
    };
}

const BlockageClass& ChannelParams::class_for(int blockers) const
{
    for (const auto& c : classes) {
        if (!c.max_blockers || blockers <= *c.max_blockers) {
            return c;
        }
    }
    throw ContractViolation("channel class table has no catch-all entry");
}

std::vector<std::pair<std::string, std::string>> channel_violations(const ChannelParams& params)
{
    std::vector<std::pair<std::string, std::string>> out;
    if (params.classes.empty()) {
        out.emplace_back("classes", "must contain at least one class");
        return out;
    }
    for (std::size_t i = 0; i < params.classes.size(); ++i) {
        const auto& c = params.classes[i];
        const std::string path = "classes[" + std::to_string(i) + "]";
        if (!(c.rho > 0.0) || !std::isfinite(c.rho)) {
            out.emplace_back(path + ".rho", "must be > 0");
        }
        if (!std::isfinite(c.gamma_dB)) {
            out.emplace_back(path + ".gamma", "must be finite");
        }
        const bool last = i + 1 == params.classes.size();
        if (last && c.max_blockers) {
            out.emplace_back(path + ".max_blockers", "last class must be unbounded (null)");
        }
        if (!last && !c.max_blockers) {
            out.emplace_back(path + ".max_blockers", "only the last class may be unbounded");
        }
        if (c.max_blockers && *c.max_blockers < 0) {
            out.emplace_back(path + ".max_blockers", "must be >= 0");
        }
        if (i > 0) {
            const auto& prev = params.classes[i - 1];
            if (prev.max_blockers && c.max_blockers && *c.max_blockers <= *prev.max_blockers) {
                out.emplace_back(path + ".max_blockers", "must be strictly increasing");
            }
            // Path loss difference is affine in log10(d); checking both ends of
            // [1 m, max_range] covers the whole interval.
            const double lo = c.gamma_dB - prev.gamma_dB;
            const double hi = lo + 10.0 * (c.rho - prev.rho) * std::log10(std::max(params.max_range_m, 1.0));
            if (lo < 0.0 || hi < 0.0) {
                out.emplace_back(path, "attenuation must not decrease with more blockers");
            }
        }
    }
    if (!(params.atmospheric_dB_per_km >= 0.0) || !std::isfinite(params.atmospheric_dB_per_km)) {
        out.emplace_back("atmospheric_dB_per_km", "must be >= 0");
    }
    if (!(params.max_range_m > 0.0) || !std::isfinite(params.max_range_m)) {
        out.emplace_back("max_range_m", "must be > 0");
    }
    return out;
}

double path_loss(double distance_m, int blockers, const ChannelParams& params)
{
    if (!(distance_m > 0.0)) {
        throw std::domain_error("path_loss: link length must be positive");
    }
    if (blockers < 0) {
        throw std::domain_error("path_loss: negative blocker count");
    }
    const auto& c = params.class_for(blockers);
    return 10.0 * c.rho * std::log10(distance_m) + c.gamma_dB
        + params.atmospheric_dB_per_km * distance_m / 1000.0;
}

LinkAssessment assess_link(Vec3 tx, Vec3 rx, int blockers, const ChannelParams& params, double budget_dB)
{
    LinkAssessment out;
    out.distance_m = (tx - rx).norm();
    if (out.distance_m == 0.0) {
        throw std::domain_error("assess_link: coincident endpoints");
    }
    out.blockers = blockers;
    out.path_loss_dB = path_loss(out.distance_m, blockers, params);
    out.feasible = out.path_loss_dB <= budget_dB && out.distance_m <= params.max_range_m;
    return out;
}

}  // namespace mmv2x
