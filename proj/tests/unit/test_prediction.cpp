#include <doctest.h>

#include "mmv2x/prediction.hpp"
#include "mmv2x/routing.hpp"
#include "mmv2x/simulation.hpp"

#include "support.hpp"

#include <cmath>

using namespace mmv2x;

namespace {

/// Vehicle on a counter-clockwise circle around `center`, at polar angle phi.
VehicleState on_circle(Vec3 center, double radius, double phi, double speed)
{
    VehicleState v = testing::car(0, center.x + radius * std::cos(phi), center.y + radius * std::sin(phi));
    v.heading = wrap_angle(phi + M_PI / 2);
    v.speed = speed;
    return v;
}

std::vector<StateSample> circle_history(Vec3 center, double radius, double speed, double dt, int samples,
                                        double phi_last = 0.0)
{
    const double omega = speed / radius;
    std::vector<StateSample> h;
    for (int k = 0; k < samples; ++k) {
        const double phi = phi_last - omega * dt * (samples - 1 - k);
        h.push_back({k, on_circle(center, radius, phi, speed)});
    }
    return h;
}

std::vector<StateSample> circle_truth(Vec3 center, double radius, double speed, double dt, std::int64_t from,
                                      std::int64_t steps, double phi_at_from)
{
    const double omega = speed / radius;
    std::vector<StateSample> out;
    for (std::int64_t k = 1; k <= steps; ++k) {
        out.push_back({from + k, on_circle(center, radius, phi_at_from + omega * dt * k, speed)});
    }
    return out;
}

const std::vector<const char*> kAnalytic{"Hold", "ConstantVelocity", "ConstantTurnRate"};

std::unique_ptr<TrajectoryPredictor> named(const char* name)
{
    PredictionParams p;
    p.predictor = parse_predictor(name);
    return make_predictor(p);
}

}  // namespace

TEST_CASE("stationary vehicles stay put under every predictor")
{
    VehicleState v = testing::car(3, 12, -4, 0.7);
    v.speed = 0;
    const std::vector<StateSample> h{{5, v}, {6, v}, {7, v}};
    for (const char* name : kAnalytic) {
        INFO(name);
        const PredictedTrack t = predict(h, 2.0, 0.1, *named(name));
        REQUIRE(t.states.size() == 20);
        for (const auto& s : t.states) {
            CHECK(s.position == v.position);
            CHECK(s.heading == doctest::Approx(v.heading));
        }
        CHECK_FALSE(t.fallback);
    }
}

TEST_CASE("constant velocity kinematics")
{
    VehicleState v = testing::car(1, 0, 0, 0);
    v.speed = 10;
    const std::vector<StateSample> h{{0, v}, {1, v}};
    const PredictedTrack t = predict(h, 1.0, 0.5, ConstantVelocityPredictor{});
    REQUIRE(t.states.size() == 2);
    CHECK(t.states[0].timestep == 2);
    CHECK(t.states[0].position.x == doctest::Approx(5.0));
    CHECK(t.states[0].position.y == doctest::Approx(0.0));
    CHECK(t.states[1].position.x == doctest::Approx(10.0));
}

TEST_CASE("constant turn rate follows a circular arc exactly")
{
    const double dt = 0.1;
    const double radius = 12.0;
    const double speed = 6.0;  // quarter turn in pi seconds
    const Vec3 center{4, -3, 0};
    const auto h = circle_history(center, radius, speed, dt, 2);
    const std::int64_t steps = 15;
    const PredictedTrack t = predict(h, 1.5, dt, ConstantTurnRatePredictor{});
    const auto truth = circle_truth(center, radius, speed, dt, 1, steps, 0.0);
    REQUIRE(t.states.size() == truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        CHECK((t.states[i].position - truth[i].state.position).norm2d() < 1e-6);
    }
    // The last predicted heading has turned 0.75 rad.
    CHECK(t.states.back().heading == doctest::Approx(wrap_angle(0.75 + M_PI / 2)).epsilon(1e-9));
}

TEST_CASE("constant velocity error on an arc matches the chord-versus-arc formula")
{
    const double dt = 0.1;
    const double radius = 12.0;
    const double speed = 6.0;
    const double omega = speed / radius;
    const Vec3 center{0, 0, 0};
    const auto h = circle_history(center, radius, speed, dt, 3);
    for (const double horizon : {0.5, 1.0, 2.0, 3.0}) {
        const PredictedTrack t = predict(h, horizon, dt, ConstantVelocityPredictor{});
        const auto truth = circle_truth(center, radius, speed, dt, 2, static_cast<std::int64_t>(t.states.size()), 0.0);
        double expected = 0.0;
        for (std::size_t k = 1; k <= t.states.size(); ++k) {
            const double theta = omega * dt * static_cast<double>(k);
            expected += radius * std::hypot(theta - std::sin(theta), 1.0 - std::cos(theta));
        }
        expected /= static_cast<double>(t.states.size());
        CHECK(prediction_error(t, truth) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("prediction_error basics")
{
    VehicleState v = testing::car(1, 0, 0);
    v.speed = 0;
    const std::vector<StateSample> h{{0, v}};
    const PredictedTrack t = predict(h, 0.3, 0.1, HoldPredictor{});
    std::vector<StateSample> same;
    std::vector<StateSample> shifted;
    for (const auto& s : t.states) {
        same.push_back({s.timestep, v});
        VehicleState moved = v;
        moved.position = moved.position + Vec3{0, 2, 0};
        shifted.push_back({s.timestep, moved});
    }
    CHECK(prediction_error(t, same) == 0.0);
    CHECK(prediction_error(t, shifted) == doctest::Approx(2.0));

    shifted.front().timestep += 1;
    CHECK_THROWS_AS(prediction_error(t, shifted), ContractViolation);
    shifted.pop_back();
    CHECK_THROWS_AS(prediction_error(t, shifted), ContractViolation);
}

TEST_CASE("shape contract and truncation consistency")
{
    const auto h = circle_history({5, 5, 0}, 20.0, 9.0, 0.1, 4);
    for (const char* name : kAnalytic) {
        INFO(name);
        const auto p = named(name);
        const PredictedTrack longer = predict(h, 3.0, 0.1, *p);
        REQUIRE(longer.states.size() == 30);
        for (std::size_t i = 0; i < longer.states.size(); ++i) {
            CHECK(longer.states[i].timestep == 4 + static_cast<std::int64_t>(i));
        }
        for (const double shorter : {0.1, 0.5, 1.7, 2.9}) {
            const PredictedTrack direct = predict(h, shorter, 0.1, *p);
            REQUIRE(direct.states.size() <= longer.states.size());
            CHECK(std::equal(direct.states.begin(), direct.states.end(), longer.states.begin()));
        }
    }
}

TEST_CASE("mean error grows with horizon on curved ground truth")
{
    // Arc followed by a straight exit: none of the analytic models is exact here.
    const double dt = 0.1;
    const double radius = 10.0;
    const double speed = 8.0;
    const double omega = speed / radius;
    const auto h = circle_history({0, 0, 0}, radius, speed, dt, 3, -1.0);
    std::vector<StateSample> truth;
    const double phi_end = 0.2;  // the turn ends here, then the vehicle goes straight
    for (std::int64_t k = 1; k <= 40; ++k) {
        const double phi = -1.0 + omega * dt * static_cast<double>(k);
        VehicleState s;
        if (phi <= phi_end) {
            s = on_circle({0, 0, 0}, radius, phi, speed);
        } else {
            const VehicleState exit = on_circle({0, 0, 0}, radius, phi_end, speed);
            const double run = (phi - phi_end) * radius;
            s = exit;
            s.position = exit.position + Vec3{run * std::cos(exit.heading), run * std::sin(exit.heading), 0};
        }
        truth.push_back({2 + k, s});
    }
    for (const char* name : kAnalytic) {
        INFO(name);
        const auto p = named(name);
        double previous = 0.0;
        for (std::int64_t n = 1; n <= 40; ++n) {
            const PredictedTrack t = predict(h, static_cast<double>(n) * dt, dt, *p);
            const double e = prediction_error(t, std::span<const StateSample>(truth.data(), static_cast<std::size_t>(n)));
            CHECK(e >= previous - 1e-12);
            previous = e;
        }
        CHECK(previous > 0.1);
    }
}

TEST_CASE("short history falls back to hold and is flagged")
{
    VehicleState v = testing::car(1, 3, 4);
    v.speed = 10;
    const std::vector<StateSample> one{{9, v}};
    for (const char* name : {"ConstantVelocity", "ConstantTurnRate"}) {
        const PredictedTrack t = predict(one, 0.5, 0.1, *named(name));
        CHECK(t.fallback);
        REQUIRE(t.states.size() == 5);
        CHECK(t.states.back().position == v.position);
        CHECK(t.states.back().timestep == 14);
    }
    CHECK_FALSE(predict(one, 0.5, 0.1, HoldPredictor{}).fallback);

    CHECK_THROWS_AS(predict({}, 0.5, 0.1, HoldPredictor{}), ContractViolation);
    const std::vector<StateSample> unordered{{3, v}, {2, v}};
    CHECK_THROWS_AS(predict(unordered, 0.5, 0.1, HoldPredictor{}), ContractViolation);
}

TEST_CASE("learned predictor exchanges trace files with an external command")
{
    const std::string script = std::string("python3 ") + MMV2X_TEST_DATA_DIR + "/learned_cv.py";
    const LearnedPredictor learned(script);
    std::vector<std::vector<StateSample>> batch;
    for (std::uint32_t i = 0; i < 3; ++i) {
        VehicleState a = testing::car(i, 10.0 * i, 1.0, 0.3 * i);
        a.speed = 5.0 + i;
        batch.push_back({{4, a}, {5, a}});
    }
    const auto tracks = learned.predict_batch(batch, 7, 0.1);
    const auto reference = ConstantVelocityPredictor{}.predict_batch(batch, 7, 0.1);
    REQUIRE(tracks.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK_FALSE(tracks[i].fallback);
        REQUIRE(tracks[i].states.size() == 7);
        for (std::size_t k = 0; k < 7; ++k) {
            CHECK(tracks[i].states[k].timestep == reference[i].states[k].timestep);
            CHECK((tracks[i].states[k].position - reference[i].states[k].position).norm() < 1e-9);
        }
    }

    const auto failed = LearnedPredictor("false").predict_batch(batch, 7, 0.1);
    for (const auto& t : failed) {
        CHECK(t.fallback);
        CHECK(t.states.size() == 7);
    }

    const std::string broken = std::string("python3 ") + MMV2X_TEST_DATA_DIR + "/learned_short.py";
    const auto partial = LearnedPredictor(broken).predict_batch(batch, 7, 0.1);
    CHECK_FALSE(partial[0].fallback);
    CHECK(partial[1].fallback);
    CHECK(partial[2].fallback);
}

TEST_CASE("learned predictor drives a predictive run")
{
    ScenarioConfig cfg;
    cfg.vehicle_count = 8;
    cfg.duration = 3.0;
    cfg.strategy = Strategy::Predictive;
    cfg.prediction.predictor = PredictorKind::Learned;
    cfg.prediction.learned_command = std::string("python3 ") + MMV2X_TEST_DATA_DIR + "/learned_cv.py";
    const RunResult learned = run_single(cfg);

    cfg.prediction.predictor = PredictorKind::ConstantVelocity;
    const RunResult cv = run_single(cfg);
    CHECK(learned.predictor_fallbacks == 0);
    CHECK(learned.total_sum == cv.total_sum);
    REQUIRE(learned.reliability.has_value());
    REQUIRE(learned.prediction_error_mean.has_value());
    // Same model, except the script also extrapolates single-sample histories.
    CHECK(std::abs(*learned.reliability - *cv.reliability) < 0.05);
    CHECK(*learned.prediction_error_mean < 1.0);
}

TEST_CASE("constant velocity on a turning vehicle plans a route the ground truth rejects")
{
    // Left turn of radius 12 m around (38, -10) starting at (50, -10) heading north.
    // After 3 s (1.5 rad) the car is near (38.8, 2.0), where a truck at (30, 1.5)
    // hides the RSU; the straight-line forecast puts it at (50, 8) with a clear view.
    const double dt = 0.1;
    const double radius = 12.0;
    const double speed = 6.0;
    const double omega = speed / radius;
    const Vec3 center{38, -10, 0};
    const VehicleState blocker = testing::truck(9, 30, 1.5);
    auto world_at = [&](std::int64_t t) {
        VehicleState v = on_circle(center, radius, omega * dt * static_cast<double>(t - 1), speed);
        v.id = NodeId::vehicle(1);
        return testing::snapshot(t, {v, blocker});
    };
    const std::vector<WorldSnapshot> history{world_at(0), world_at(1)};

    PredictiveRequest req;
    req.now = 2;
    req.horizon_steps = 30;
    req.interval_steps = 30;
    req.history_steps = 1;
    const LinkModel model = LinkModel::from_config(ScenarioConfig{});
    const PredictivePlan plan = route_predictive(history, req, ConstantVelocityPredictor{}, model);
    REQUIRE(plan.schedule.back().timestep == 31);

    const PredictedState& forecast = plan.tracks.front().states.back();
    const WorldSnapshot truth = world_at(31);
    const double theta = 1.5;
    const double divergence = radius * std::hypot(theta - std::sin(theta), 1.0 - std::cos(theta));
    CHECK((forecast.position - truth.vehicles.front().position).norm2d() == doctest::Approx(divergence).epsilon(1e-9));
    CHECK(forecast.position.x == doctest::Approx(50.0));
    CHECK(forecast.position.y == doctest::Approx(8.0));

    const auto* planned = plan.schedule.back().table.lookup(NodeId::vehicle(1));
    REQUIRE(planned != nullptr);
    REQUIRE(planned->has_value());
    CHECK((*planned)->hops.size() == 2);
    CHECK_FALSE(score_route(*planned, build_topology(truth, model)));
    // The first planned step still holds.
    CHECK(score_route(*plan.schedule.front().table.lookup(NodeId::vehicle(1)), build_topology(world_at(2), model)));
}
