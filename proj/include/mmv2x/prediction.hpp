#pragma once

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mmv2x {

struct StateSample {
    std::int64_t timestep = 0;
    VehicleState state;
};

struct PredictedState {
    std::int64_t timestep = 0;
    Vec3 position;
    double heading = 0.0;
    double speed = 0.0;

    friend bool operator==(const PredictedState&, const PredictedState&) = default;
};

/// Forecast poses at timesteps last+1 .. last+horizon_steps.
struct PredictedTrack {
    NodeId vehicle;
    std::vector<PredictedState> states;
    bool fallback = false;  // produced by position hold after a predictor failure

    friend bool operator==(const PredictedTrack&, const PredictedTrack&) = default;
};

class TrajectoryPredictor {
public:
    virtual ~TrajectoryPredictor() = default;

    virtual PredictorKind kind() const = 0;

    /// Fewest history samples extrapolate() accepts.
    virtual std::size_t min_history() const = 0;

    /// Called only with at least min_history() samples ordered by timestep.
    virtual PredictedTrack extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                                       double dt) const = 0;

    /// One track per history, in the same order. Histories that are too short
    /// fall back to position hold and are flagged.
    virtual std::vector<PredictedTrack> predict_batch(std::span<const std::vector<StateSample>> histories,
                                                      std::int64_t horizon_steps, double dt) const;
};

class HoldPredictor final : public TrajectoryPredictor {
public:
    PredictorKind kind() const override { return PredictorKind::Hold; }
    std::size_t min_history() const override { return 1; }
    PredictedTrack extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                               double dt) const override;
};

/// Straight-line extrapolation along the last heading at the last speed.
class ConstantVelocityPredictor final : public TrajectoryPredictor {
public:
    PredictorKind kind() const override { return PredictorKind::ConstantVelocity; }
    std::size_t min_history() const override { return 2; }
    PredictedTrack extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                               double dt) const override;
};

/// Circular-arc extrapolation with the yaw rate of the last two samples.
class ConstantTurnRatePredictor final : public TrajectoryPredictor {
public:
    PredictorKind kind() const override { return PredictorKind::ConstantTurnRate; }
    std::size_t min_history() const override { return 2; }
    PredictedTrack extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                               double dt) const override;
};

/// Delegates to an external model through files in the mobility trace schema.
///
/// The command is run as `<command> <history.csv> <predicted.csv> <horizon_steps> <dt>`.
/// It reads every vehicle's history and must write, per vehicle, one record
/// for each of the next horizon_steps timesteps. Vehicles with missing or
/// misshaped output, or every vehicle when the command fails, fall back to
/// position hold.
class LearnedPredictor final : public TrajectoryPredictor {
public:
    explicit LearnedPredictor(std::string command);

    PredictorKind kind() const override { return PredictorKind::Learned; }
    std::size_t min_history() const override { return 1; }
    PredictedTrack extrapolate(std::span<const StateSample> history, std::int64_t horizon_steps,
                               double dt) const override;
    std::vector<PredictedTrack> predict_batch(std::span<const std::vector<StateSample>> histories,
                                              std::int64_t horizon_steps, double dt) const override;

private:
    std::string command_;
};

std::unique_ptr<TrajectoryPredictor> make_predictor(const PredictionParams& params);

/// Position hold; used directly and as the failure fallback.
PredictedTrack hold_track(const StateSample& last, std::int64_t horizon_steps, bool fallback);

/// Forecast over `horizon` seconds (rounded down to whole steps, at least one).
/// Throws ContractViolation on empty or unordered history.
PredictedTrack predict(std::span<const StateSample> history, double horizon, double dt,
                       const TrajectoryPredictor& predictor);

/// Mean planar displacement between the track and ground truth, which must
/// carry exactly the track's timesteps. Throws ContractViolation otherwise.
double prediction_error(const PredictedTrack& track, std::span<const StateSample> ground_truth);

}  // namespace mmv2x
