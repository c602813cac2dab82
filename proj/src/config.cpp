#include "mmv2x/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mmv2x {

using nlohmann::json;

std::string to_string(Strategy s)
{
    switch (s) {
    case Strategy::RealTime: return "RealTime";
    case Strategy::Predictive: return "Predictive";
    case Strategy::Conventional: return "Conventional";
    }
    return "?";
}

std::string to_string(PredictorKind k)
{
    switch (k) {
    case PredictorKind::Hold: return "Hold";
    case PredictorKind::ConstantVelocity: return "ConstantVelocity";
    case PredictorKind::ConstantTurnRate: return "ConstantTurnRate";
    case PredictorKind::Learned: return "Learned";
    }
    return "?";
}

Strategy parse_strategy(const std::string& text)
{
    for (auto s : {Strategy::RealTime, Strategy::Predictive, Strategy::Conventional}) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw ConfigError("unknown strategy '" + text + "'");
}

PredictorKind parse_predictor(const std::string& text)
{
    for (auto k : {PredictorKind::Hold, PredictorKind::ConstantVelocity, PredictorKind::ConstantTurnRate,
                   PredictorKind::Learned}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError("unknown predictor '" + text + "'");
}

bool ValidationReport::mentions(const std::string& field) const
{
    for (const auto& v : violations) {
        if (v.field == field) {
            return true;
        }
        // "speed" also matches "speed.min", "channel.classes" matches "channel.classes[2].rho".
        if (v.field.size() > field.size() && v.field.compare(0, field.size(), field) == 0
            && (v.field[field.size()] == '.' || v.field[field.size()] == '[')) {
            return true;
        }
    }
    return false;
}

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (const auto& v : violations) {
        os << v.field << ": " << v.message << '\n';
    }
    return os.str();
}

namespace {

class Checker {
public:
    void require(bool ok, const std::string& field, const std::string& message)
    {
        if (!ok) {
            report.violations.push_back({field, message});
        }
    }

    void positive(double value, const std::string& field)
    {
        require(std::isfinite(value) && value > 0.0, field, "must be > 0");
    }

    ValidationReport report;
};

void check_class(Checker& c, const VehicleClass& vc, const std::string& path)
{
    c.positive(vc.dimensions.length, path + ".length");
    c.positive(vc.dimensions.width, path + ".width");
    c.positive(vc.dimensions.height, path + ".height");
    c.require(vc.antenna_height > 0.0 && vc.antenna_height <= vc.dimensions.height + 1.0,
              path + ".antenna_height", "must lie in (0, height + 1]");
}

}  // namespace

ValidationReport validate_config(const ScenarioConfig& cfg)
{
    Checker c;
    c.positive(cfg.dt, "dt");
    c.require(std::isfinite(cfg.duration) && cfg.duration >= cfg.dt, "duration", "must be >= dt");
    c.require(cfg.vehicle_count >= 0, "vehicle_count", "must be >= 0");
    c.require(cfg.connected_fraction >= 0.0 && cfg.connected_fraction <= 1.0, "connected_fraction",
              "must lie in [0, 1]");

    c.positive(cfg.intersection.arm_length, "intersection.arm_length");
    c.require(cfg.intersection.lane_count >= 1, "intersection.lane_count", "must be >= 1");
    c.positive(cfg.intersection.lane_width, "intersection.lane_width");
    c.require(cfg.intersection.junction_margin >= 0.0, "intersection.junction_margin", "must be >= 0");
    c.require(cfg.intersection.arm_length > cfg.intersection.junction_half_size(), "intersection.arm_length",
              "must exceed the junction half size");

    c.require(cfg.speed.min >= 0.0, "speed.min", "must be >= 0");
    c.require(std::isfinite(cfg.speed.max) && cfg.speed.max >= cfg.speed.min, "speed.max", "must be >= speed.min");

    check_class(c, cfg.fleet.car, "fleet.car");
    check_class(c, cfg.fleet.heavy, "fleet.heavy");
    c.require(cfg.fleet.heavy_fraction >= 0.0 && cfg.fleet.heavy_fraction <= 1.0, "fleet.heavy_fraction",
              "must lie in [0, 1]");
    c.require(cfg.fleet.turn_fraction >= 0.0 && cfg.fleet.turn_fraction <= 1.0, "fleet.turn_fraction",
              "must lie in [0, 1]");
    c.positive(cfg.fleet.min_gap, "fleet.min_gap");
    c.require(cfg.fleet.bumper_clearance >= 0.0, "fleet.bumper_clearance", "must be >= 0");

    for (const auto& [field, message] : channel_violations(cfg.channel)) {
        c.require(false, "channel." + field, message);
    }
    c.require(std::isfinite(cfg.link_budget_dB), "link_budget_dB", "must be finite");
    c.positive(cfg.rsu_height, "rsu_height");

    c.require(std::isfinite(cfg.latency_delta) && cfg.latency_delta >= 0.0, "latency_delta", "must be >= 0");
    c.require(std::isfinite(cfg.prediction.interval) && cfg.prediction.interval >= cfg.dt, "prediction.interval",
              "must be >= dt");
    c.require(std::isfinite(cfg.prediction.horizon) && cfg.prediction.horizon >= cfg.prediction.interval,
              "prediction.horizon", "must be >= prediction.interval");
    c.require(std::isfinite(cfg.prediction.history_window) && cfg.prediction.history_window >= cfg.dt,
              "prediction.history_window", "must be >= dt");
    c.require(cfg.prediction.predictor != PredictorKind::Learned || !cfg.prediction.learned_command.empty(),
              "prediction.learned_command", "required for the Learned predictor");
    c.require(std::isfinite(cfg.conventional_update_interval) && cfg.conventional_update_interval >= cfg.dt,
              "conventional_update_interval", "must be >= dt");
    c.require(!cfg.max_hops || *cfg.max_hops >= 1, "max_hops", "must be >= 1 or null");

    for (std::size_t i = 0; i < cfg.static_obstacles.size(); ++i) {
        const auto& o = cfg.static_obstacles[i];
        const std::string path = "static_obstacles[" + std::to_string(i) + "]";
        c.positive(o.dimensions.length, path + ".length");
        c.positive(o.dimensions.width, path + ".width");
        c.positive(o.dimensions.height, path + ".height");
    }
    return c.report;
}

namespace {

/// Walks one JSON object, remembering which keys were consumed so leftovers
/// can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object()) {
            throw ConfigError(where() + "expected an object");
        }
    }

    /// Throws on any key that was never requested.
    void finish() const
    {
        for (const auto& [key, _] : obj_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError("unknown key '" + (path_.empty() ? key : path_ + "." + key) + "'");
            }
        }
    }

    ObjectReader(const ObjectReader&) = delete;
    ObjectReader& operator=(const ObjectReader&) = delete;

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T>
    void read(const std::string& key, T& out)
    {
        if (const json* v = get(key)) {
            try {
                if constexpr (std::is_floating_point_v<T>) {
                    if (!v->is_number()) {
                        throw ConfigError("");
                    }
                } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                    if (!v->is_number_integer()) {
                        throw ConfigError("");
                    }
                }
                out = v->get<T>();
            } catch (const std::exception&) {
                throw ConfigError("bad value for '" + child(key) + "'");
            }
        }
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    std::string where() const { return path_.empty() ? "" : path_ + ": "; }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void read_dimensions(ObjectReader& r, Dimensions& d)
{
    r.read("length", d.length);
    r.read("width", d.width);
    r.read("height", d.height);
}

void read_vehicle_class(const json& j, const std::string& path, VehicleClass& vc)
{
    ObjectReader r(j, path);
    read_dimensions(r, vc.dimensions);
    r.read("antenna_height", vc.antenna_height);
    r.finish();
}

void read_channel(const json& j, ChannelParams& ch)
{
    ObjectReader r(j, "channel");
    if (const json* classes = r.get("classes")) {
        if (!classes->is_array()) {
            throw ConfigError("channel.classes must be an array");
        }
        ch.classes.clear();
        for (std::size_t i = 0; i < classes->size(); ++i) {
            ObjectReader cr((*classes)[i], "channel.classes[" + std::to_string(i) + "]");
            BlockageClass bc;
            if (const json* mb = cr.get("max_blockers")) {
                if (mb->is_null()) {
                    bc.max_blockers.reset();
                } else if (mb->is_number_integer()) {
                    bc.max_blockers = mb->get<int>();
                } else {
                    throw ConfigError("bad value for '" + cr.child("max_blockers") + "'");
                }
            } else {
                bc.max_blockers.reset();
            }
            cr.read("rho", bc.rho);
            cr.read("gamma", bc.gamma_dB);
            cr.finish();
            ch.classes.push_back(bc);
        }
    }
    r.read("atmospheric_dB_per_km", ch.atmospheric_dB_per_km);
    r.read("max_range_m", ch.max_range_m);
    r.finish();
}

ScenarioConfig parse_root(const json& root)
{
    ScenarioConfig cfg;
    ObjectReader r(root, "");
    r.read("seed", cfg.seed);
    r.read("duration", cfg.duration);
    r.read("dt", cfg.dt);
    r.read("vehicle_count", cfg.vehicle_count);
    r.read("connected_fraction", cfg.connected_fraction);
    if (const json* j = r.get("intersection")) {
        ObjectReader ir(*j, "intersection");
        ir.read("arm_length", cfg.intersection.arm_length);
        ir.read("lane_count", cfg.intersection.lane_count);
        ir.read("lane_width", cfg.intersection.lane_width);
        ir.read("junction_margin", cfg.intersection.junction_margin);
        ir.finish();
    }
    if (const json* j = r.get("speed")) {
        ObjectReader sr(*j, "speed");
        sr.read("min", cfg.speed.min);
        sr.read("max", cfg.speed.max);
        sr.finish();
    }
    if (const json* j = r.get("fleet")) {
        ObjectReader fr(*j, "fleet");
        if (const json* car = fr.get("car")) {
            read_vehicle_class(*car, "fleet.car", cfg.fleet.car);
        }
        if (const json* heavy = fr.get("heavy")) {
            read_vehicle_class(*heavy, "fleet.heavy", cfg.fleet.heavy);
        }
        fr.read("heavy_fraction", cfg.fleet.heavy_fraction);
        fr.read("turn_fraction", cfg.fleet.turn_fraction);
        fr.read("min_gap", cfg.fleet.min_gap);
        fr.read("bumper_clearance", cfg.fleet.bumper_clearance);
        fr.finish();
    }
    if (const json* j = r.get("channel")) {
        read_channel(*j, cfg.channel);
    }
    r.read("link_budget_dB", cfg.link_budget_dB);
    r.read("rsu_height", cfg.rsu_height);
    if (const json* j = r.get("strategy")) {
        if (!j->is_string()) {
            throw ConfigError("bad value for 'strategy'");
        }
        cfg.strategy = parse_strategy(j->get<std::string>());
    }
    r.read("latency_delta", cfg.latency_delta);
    if (const json* j = r.get("prediction")) {
        ObjectReader pr(*j, "prediction");
        pr.read("horizon", cfg.prediction.horizon);
        pr.read("interval", cfg.prediction.interval);
        if (const json* p = pr.get("predictor")) {
            if (!p->is_string()) {
                throw ConfigError("bad value for 'prediction.predictor'");
            }
            cfg.prediction.predictor = parse_predictor(p->get<std::string>());
        }
        pr.read("history_window", cfg.prediction.history_window);
        pr.read("learned_command", cfg.prediction.learned_command);
        pr.finish();
    }
    r.read("conventional_update_interval", cfg.conventional_update_interval);
    if (const json* j = r.get("max_hops")) {
        if (j->is_null()) {
            cfg.max_hops.reset();
        } else if (j->is_number_integer()) {
            cfg.max_hops = j->get<int>();
        } else {
            throw ConfigError("bad value for 'max_hops'");
        }
    }
    if (const json* j = r.get("static_obstacles")) {
        if (!j->is_array()) {
            throw ConfigError("static_obstacles must be an array");
        }
        for (std::size_t i = 0; i < j->size(); ++i) {
            ObjectReader orr((*j)[i], "static_obstacles[" + std::to_string(i) + "]");
            StaticObstacle o;
            orr.read("x", o.x);
            orr.read("y", o.y);
            orr.read("yaw", o.yaw);
            read_dimensions(orr, o.dimensions);
            orr.finish();
            cfg.static_obstacles.push_back(o);
        }
    }
    r.finish();
    return cfg;
}

json class_json(const VehicleClass& vc)
{
    return {{"length", vc.dimensions.length},
            {"width", vc.dimensions.width},
            {"height", vc.dimensions.height},
            {"antenna_height", vc.antenna_height}};
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_root(root);
}

std::string config_to_json_text(const ScenarioConfig& cfg)
{
    json classes = json::array();
    for (const auto& c : cfg.channel.classes) {
        classes.push_back({{"max_blockers", c.max_blockers ? json(*c.max_blockers) : json(nullptr)},
                           {"rho", c.rho},
                           {"gamma", c.gamma_dB}});
    }
    json obstacles = json::array();
    for (const auto& o : cfg.static_obstacles) {
        obstacles.push_back({{"x", o.x},
                             {"y", o.y},
                             {"yaw", o.yaw},
                             {"length", o.dimensions.length},
                             {"width", o.dimensions.width},
                             {"height", o.dimensions.height}});
    }
    json root = {
        {"seed", cfg.seed},
        {"duration", cfg.duration},
        {"dt", cfg.dt},
        {"vehicle_count", cfg.vehicle_count},
        {"connected_fraction", cfg.connected_fraction},
        {"intersection",
         {{"arm_length", cfg.intersection.arm_length},
          {"lane_count", cfg.intersection.lane_count},
          {"lane_width", cfg.intersection.lane_width},
          {"junction_margin", cfg.intersection.junction_margin}}},
        {"speed", {{"min", cfg.speed.min}, {"max", cfg.speed.max}}},
        {"fleet",
         {{"car", class_json(cfg.fleet.car)},
          {"heavy", class_json(cfg.fleet.heavy)},
          {"heavy_fraction", cfg.fleet.heavy_fraction},
          {"turn_fraction", cfg.fleet.turn_fraction},
          {"min_gap", cfg.fleet.min_gap},
          {"bumper_clearance", cfg.fleet.bumper_clearance}}},
        {"channel",
         {{"classes", classes},
          {"atmospheric_dB_per_km", cfg.channel.atmospheric_dB_per_km},
          {"max_range_m", cfg.channel.max_range_m}}},
        {"link_budget_dB", cfg.link_budget_dB},
        {"rsu_height", cfg.rsu_height},
        {"strategy", to_string(cfg.strategy)},
        {"latency_delta", cfg.latency_delta},
        {"prediction",
         {{"horizon", cfg.prediction.horizon},
          {"interval", cfg.prediction.interval},
          {"predictor", to_string(cfg.prediction.predictor)},
          {"history_window", cfg.prediction.history_window},
          {"learned_command", cfg.prediction.learned_command}}},
        {"conventional_update_interval", cfg.conventional_update_interval},
        {"max_hops", cfg.max_hops ? json(*cfg.max_hops) : json(nullptr)},
        {"static_obstacles", obstacles},
    };
    return root.dump(2) + "\n";
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_digest(const ScenarioConfig& config)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : config_to_json_text(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xF];
        h >>= 4;
    }
    return out;
}

}  // namespace mmv2x
