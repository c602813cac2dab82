#include <doctest.h>

#include "mmv2x/config.hpp"
#include "mmv2x/core.hpp"

#include "support.hpp"

using namespace mmv2x;

TEST_CASE("node ids order the RSU first and print compactly")
{
    CHECK(NodeId::rsu() < NodeId::vehicle(0));
    CHECK(NodeId::vehicle(2) < NodeId::vehicle(10));
    CHECK(NodeId::rsu().to_string() == "RSU");
    CHECK(NodeId::vehicle(17).to_string() == "V17");
    CHECK(NodeId::parse("V17") == NodeId::vehicle(17));
    CHECK(NodeId::parse("RSU") == NodeId::rsu());
    CHECK_THROWS(NodeId::parse("X1"));
    CHECK_THROWS(NodeId::parse("V"));
    CHECK_THROWS(NodeId::parse("V-3"));
}

TEST_CASE("step arithmetic")
{
    CHECK(steps_floor(1.0, 0.1) == 10);
    CHECK(steps_floor(0.3, 0.1) == 3);
    CHECK(steps_floor(0.0, 0.1) == 0);
    CHECK(steps_floor(0.05, 0.1) == 0);
    CHECK(schedule_steps(0.05, 0.1) == 1);
    CHECK(schedule_steps(5.0, 0.1) == 50);
    ScenarioConfig c;
    c.duration = 600;
    CHECK(c.total_steps() == 6000);
}

TEST_CASE("snapshot lookup")
{
    const WorldSnapshot s = testing::snapshot(0, {testing::car(3, 0, 0), testing::car(1, 5, 0, 0, false)});
    REQUIRE(s.find(NodeId::vehicle(3)) != nullptr);
    CHECK(s.find(NodeId::vehicle(2)) == nullptr);
    CHECK(s.connected_ids() == std::vector<NodeId>{NodeId::vehicle(3)});
}

TEST_CASE("validate_config examples")
{
    ScenarioConfig c;
    c.dt = 0.1;
    c.duration = 60;
    CHECK(validate_config(c).ok());

    ScenarioConfig zero_dt = c;
    zero_dt.dt = 0;
    CHECK(validate_config(zero_dt).mentions("dt"));

    ScenarioConfig fraction = c;
    fraction.connected_fraction = 1.3;
    CHECK(validate_config(fraction).mentions("connected_fraction"));
}

TEST_CASE("validate_config catches each boundary")
{
    auto flags = [](auto mutate, const char* field) {
        ScenarioConfig c;
        mutate(c);
        const ValidationReport r = validate_config(c);
        INFO(field << ": " << r.to_string());
        CHECK(r.mentions(field));
    };
    flags([](ScenarioConfig& c) { c.duration = 0.05; }, "duration");
    flags([](ScenarioConfig& c) { c.vehicle_count = -1; }, "vehicle_count");
    flags([](ScenarioConfig& c) { c.conventional_update_interval = 0.01; }, "conventional_update_interval");
    flags([](ScenarioConfig& c) { c.prediction.interval = 3.0; }, "prediction.horizon");
    flags([](ScenarioConfig& c) { c.prediction.interval = 0.01; }, "prediction.interval");
    flags([](ScenarioConfig& c) { c.latency_delta = -1; }, "latency_delta");
    flags([](ScenarioConfig& c) { c.speed.min = 20; }, "speed");
    flags([](ScenarioConfig& c) { c.max_hops = 0; }, "max_hops");
    flags([](ScenarioConfig& c) { c.channel.classes.clear(); }, "channel.classes");
    flags([](ScenarioConfig& c) { c.channel.classes.back().max_blockers = 9; }, "channel.classes");
    flags([](ScenarioConfig& c) { c.channel.classes[1].max_blockers = 0; }, "channel.classes");
    flags([](ScenarioConfig& c) { c.channel.classes[0].rho = 0; }, "channel.classes");
    flags([](ScenarioConfig& c) { c.channel.classes[1].gamma_dB = 60; }, "channel.classes");
    flags([](ScenarioConfig& c) { c.fleet.car.antenna_height = 3.0; }, "fleet.car");
    flags([](ScenarioConfig& c) { c.fleet.heavy.dimensions.width = 0; }, "fleet.heavy");
    flags([](ScenarioConfig& c) { c.rsu_height = 0; }, "rsu_height");
    flags([](ScenarioConfig& c) { c.prediction.predictor = PredictorKind::Learned; }, "prediction.learned_command");
}

TEST_CASE("validate_config is pure")
{
    ScenarioConfig c;
    c.dt = -1;
    c.connected_fraction = 2;
    const auto a = validate_config(c);
    const auto b = validate_config(c);
    CHECK(a.to_string() == b.to_string());
    CHECK(a.violations.size() >= 2);
}

TEST_CASE("config JSON round trip")
{
    ScenarioConfig c;
    c.seed = 0xdeadbeefcafef00dULL;
    c.duration = 12.5;
    c.vehicle_count = 7;
    c.connected_fraction = 0.3;
    c.strategy = Strategy::Predictive;
    c.latency_delta = 0.7;
    c.prediction.predictor = PredictorKind::ConstantTurnRate;
    c.prediction.horizon = 3.3;
    c.max_hops = 2;
    c.channel.classes[2].gamma_dB = 101.1;
    c.fleet.heavy_fraction = 0.123456789;
    c.static_obstacles.push_back({10, -4, 0.3, {3, 2, 6}});
    const ScenarioConfig back = config_from_json_text(config_to_json_text(c));
    CHECK(back == c);
    CHECK(config_digest(back) == config_digest(c));

    ScenarioConfig d = c;
    d.seed += 1;
    CHECK(config_digest(d) != config_digest(c));
    CHECK(config_digest(c).size() == 16);
}

TEST_CASE("config round trip over seeded random values")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        ScenarioConfig c;
        c.seed = rng();
        c.duration = 1.0 + 1000.0 * u(rng);
        c.dt = 0.01 + u(rng) / 3.0;
        c.connected_fraction = u(rng);
        c.link_budget_dB = 90 + 40 * u(rng);
        c.intersection.lane_width = 2.5 + u(rng);
        c.speed.min = 5 * u(rng);
        c.speed.max = c.speed.min + 10 * u(rng);
        c.max_hops = (i % 2 == 0) ? std::optional<int>() : std::optional<int>(1 + i % 4);
        c.strategy = static_cast<Strategy>(i % 3);
        CHECK(config_from_json_text(config_to_json_text(c)) == c);
    }
}

TEST_CASE("config parsing rejects malformed input")
{
    CHECK_THROWS_AS(config_from_json_text("{"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text("[]"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"sed": 1})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"dt": "fast"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"intersection": {"lanes": 2}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"strategy": "Fastest"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json_text(R"({"prediction": {"predictor": "LSTM"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

    const ScenarioConfig partial = config_from_json_text(R"({"vehicle_count": 12, "max_hops": null})");
    CHECK(partial.vehicle_count == 12);
    CHECK_FALSE(partial.max_hops.has_value());
    CHECK(partial.dt == 0.1);
}

TEST_CASE("enum names")
{
    for (Strategy s : {Strategy::RealTime, Strategy::Predictive, Strategy::Conventional}) {
        CHECK(parse_strategy(to_string(s)) == s);
    }
    for (PredictorKind k : {PredictorKind::Hold, PredictorKind::ConstantVelocity, PredictorKind::ConstantTurnRate,
                            PredictorKind::Learned}) {
        CHECK(parse_predictor(to_string(k)) == k);
    }
}

TEST_CASE("shipped configs validate")
{
    for (const auto& entry : std::filesystem::directory_iterator(MMV2X_CONFIG_DIR)) {
        if (entry.path().extension() != ".json" || entry.path().filename().string().starts_with("sweep")) {
            continue;
        }
        INFO(entry.path().string());
        CHECK(validate_config(load_config(entry.path())).ok());
    }
}
