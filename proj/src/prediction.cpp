#include "mmv2x/prediction.hpp"

#include "mmv2x/format.hpp"
#include "mmv2x/trace_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include <unistd.h>

namespace mmv2x {

namespace {

void check_history(std::span<const StateSample> history)
{
    if (history.empty()) {
        throw ContractViolation("prediction needs at least one history sample");
    }
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i].timestep <= history[i - 1].timestep) {
            throw ContractViolation("history samples must have strictly increasing timesteps");
        }
        if (history[i].state.id != history[0].state.id) {
            throw ContractViolation("history mixes vehicles");
        }
    }
}

}  // namespace

PredictedTrack hold_track(const StateSample& last, std::int64_t horizon_steps, bool fallback)
{
    PredictedTrack track;
    track.vehicle = last.state.id;
    track.fallback = fallback;
    for (std::int64_t k = 1; k <= horizon_steps; ++k) {
        track.states.push_back({last.timestep + k, last.state.position, last.state.heading, last.state.speed});
    }
    return track;
}

std::vector<PredictedTrack> TrajectoryPredictor::predict_batch(std::span<const std::vector<StateSample>> histories,
                                                               std::int64_t horizon_steps, double dt) const
{
    std::vector<PredictedTrack> out;
    out.reserve(histories.size());
    for (const auto& h : histories) {
        check_history(h);
        if (h.size() < min_history()) {
            out.push_back(hold_track(h.back(), horizon_steps, true));
        } else {
            out.push_back(extrapolate(h, horizon_steps, dt));
        }
    }
    return out;
}

PredictedTrack HoldPredictor::extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                                          double) const
{
    return hold_track(history.back(), horizon_steps, false);
}

PredictedTrack ConstantVelocityPredictor::extrapolate(std::span<const StateSample> history,
                                                      std::int64_t horizon_steps, double dt) const
{
    const StateSample& last = history.back();
    const double vx = last.state.speed * std::cos(last.state.heading);
    const double vy = last.state.speed * std::sin(last.state.heading);
    PredictedTrack track;
    track.vehicle = last.state.id;
    for (std::int64_t k = 1; k <= horizon_steps; ++k) {
        const double tau = static_cast<double>(k) * dt;
        const Vec3 p{last.state.position.x + vx * tau, last.state.position.y + vy * tau, last.state.position.z};
        track.states.push_back({last.timestep + k, p, last.state.heading, last.state.speed});
    }
    return track;
}

PredictedTrack ConstantTurnRatePredictor::extrapolate(std::span<const StateSample> history,
                                                      std::int64_t horizon_steps, double dt) const
{
    const StateSample& last = history.back();
    const StateSample& prev = history[history.size() - 2];
    const double elapsed = static_cast<double>(last.timestep - prev.timestep) * dt;
    const double yaw_rate = wrap_angle(last.state.heading - prev.state.heading) / elapsed;
    const double v = last.state.speed;
    const double h0 = last.state.heading;
    const Vec3 p0 = last.state.position;

    PredictedTrack track;
    track.vehicle = last.state.id;
    for (std::int64_t k = 1; k <= horizon_steps; ++k) {
        const double tau = static_cast<double>(k) * dt;
        PredictedState s{last.timestep + k, p0, h0, v};
        if (std::abs(yaw_rate) < 1e-9) {
            s.position = {p0.x + v * tau * std::cos(h0), p0.y + v * tau * std::sin(h0), p0.z};
        } else {
            const double h = h0 + yaw_rate * tau;
            const double r = v / yaw_rate;
            s.position = {p0.x + r * (std::sin(h) - std::sin(h0)), p0.y + r * (std::cos(h0) - std::cos(h)), p0.z};
            s.heading = wrap_angle(h);
        }
        track.states.push_back(s);
    }
    return track;
}

LearnedPredictor::LearnedPredictor(std::string command) : command_(std::move(command)) {}

PredictedTrack LearnedPredictor::extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                                             double dt) const
{
    std::vector<std::vector<StateSample>> one{std::vector<StateSample>(history.begin(), history.end())};
    return predict_batch(one, horizon_steps, dt).front();
}

std::vector<PredictedTrack> LearnedPredictor::predict_batch(std::span<const std::vector<StateSample>> histories,
                                                            std::int64_t horizon_steps, double dt) const
{
    for (const auto& h : histories) {
        check_history(h);
    }
    static std::atomic<unsigned> counter{0};
    const auto dir = std::filesystem::temp_directory_path();
    const std::string stem = "mmv2x-learned-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
    const auto in_path = dir / (stem + "-in.csv");
    const auto out_path = dir / (stem + "-out.csv");

    {
        std::ofstream os(in_path);
        write_trace_header(os);
        for (const auto& h : histories) {
            for (const auto& s : h) {
                write_trace_record(os, to_record(s.timestep, static_cast<double>(s.timestep) * dt, s.state));
            }
        }
    }

    const std::string cmd = command_ + " '" + in_path.string() + "' '" + out_path.string() + "' "
        + std::to_string(horizon_steps) + " " + format_double(dt);
    const int status = std::system(cmd.c_str());

    std::map<NodeId, std::vector<TraceRecord>> produced;
    if (status == 0) {
        std::ifstream is(out_path);
        try {
            for (const auto& r : read_trace(is)) {
                produced[r.id].push_back(r);
            }
        } catch (const TraceError&) {
            produced.clear();
        }
    }
    std::error_code ignored;
    std::filesystem::remove(in_path, ignored);
    std::filesystem::remove(out_path, ignored);

    std::vector<PredictedTrack> out;
    out.reserve(histories.size());
    for (const auto& h : histories) {
        const StateSample& last = h.back();
        auto it = produced.find(last.state.id);
        bool shaped = it != produced.end() && it->second.size() == static_cast<std::size_t>(horizon_steps);
        if (shaped) {
            std::sort(it->second.begin(), it->second.end(),
                      [](const TraceRecord& l, const TraceRecord& r) { return l.timestep < r.timestep; });
            for (std::int64_t k = 0; k < horizon_steps && shaped; ++k) {
                shaped = it->second[static_cast<std::size_t>(k)].timestep == last.timestep + k + 1;
            }
        }
        if (!shaped) {
            out.push_back(hold_track(last, horizon_steps, true));
            continue;
        }
        PredictedTrack track;
        track.vehicle = last.state.id;
        for (const auto& r : it->second) {
            track.states.push_back({r.timestep, {r.x, r.y, last.state.position.z}, r.heading, r.speed});
        }
        out.push_back(std::move(track));
    }
    return out;
}

std::unique_ptr<TrajectoryPredictor> make_predictor(const PredictionParams& params)
{
    switch (params.predictor) {
    case PredictorKind::Hold: return std::make_unique<HoldPredictor>();
    case PredictorKind::ConstantVelocity: return std::make_unique<ConstantVelocityPredictor>();
    case PredictorKind::ConstantTurnRate: return std::make_unique<ConstantTurnRatePredictor>();
    case PredictorKind::Learned: return std::make_unique<LearnedPredictor>(params.learned_command);
    }
    throw ContractViolation("unknown predictor kind");
}

PredictedTrack predict(std::span<const StateSample> history, double horizon, double dt,
                       const TrajectoryPredictor& predictor)
{
    check_history(history);
    const std::vector<std::vector<StateSample>> one{std::vector<StateSample>(history.begin(), history.end())};
    return predictor.predict_batch(one, schedule_steps(horizon, dt), dt).front();
}

double prediction_error(const PredictedTrack& track, std::span<const StateSample> ground_truth)
{
    if (track.states.size() != ground_truth.size()) {
        throw ContractViolation("prediction_error: track and ground truth differ in length");
    }
    if (track.states.empty()) {
        throw ContractViolation("prediction_error: empty track");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < track.states.size(); ++i) {
        if (track.states[i].timestep != ground_truth[i].timestep) {
            throw ContractViolation("prediction_error: misaligned timesteps");
        }
        const Vec3 d = track.states[i].position - ground_truth[i].state.position;
        sum += d.norm2d();
    }
    return sum / static_cast<double>(track.states.size());
}

}  // namespace mmv2x
