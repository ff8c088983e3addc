#include "swnoon/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "swnoon/io.hpp"

namespace swnoon {

using nlohmann::json;

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> errs;
    auto bad = [&](const std::string& field, const std::string& why) {
        errs.push_back(field + ": " + why);
    };
    if (!(chi >= 0.0) || chi >= 1.0) bad("chi", "must lie in [0, 1)");
    if (cutoff < 1 || cutoff > 16) bad("cutoff", "must lie in [1, 16]");
    if (!(lambda_m > 0.0)) bad("lambda_m", "must be > 0");
    if (!(std::abs(theta_rad) < 1.5707963267948966)) bad("theta_rad", "|theta| must be < pi/2");
    if (!std::isfinite(v0_mps)) bad("v0_mps", "must be finite");
    if (pump_power_mw < 0.0) bad("pump_power_mw", "must be >= 0");
    if (pump_model.v_max_mps < 0.0) bad("pump_model.v_max_mps", "must be >= 0");
    if (!(pump_model.p_sat_mw > 0.0)) bad("pump_model.p_sat_mw", "must be > 0");
    if (!(tau_s > 0.0)) bad("tau_s", "must be > 0");
    if (!(gamma0 > 0.0) || gamma0 > 1.0) bad("gamma0", "must lie in (0, 1]");
    if (gamma_b < 0.0 || gamma_b >= 1.0) bad("gamma_b", "must lie in [0, 1)");
    if (!std::isfinite(phi_stab_rad)) bad("phi_stab_rad", "must be finite");
    if (trials_per_point < 0) bad("trials_per_point", "must be >= 0");
    if (dt_grid.count < 1) bad("dt_grid.count", "must be >= 1");
    if (dt_grid.start_s < 0.0) bad("dt_grid.start_s", "must be >= 0");
    if (dt_grid.count > 1 && !(dt_grid.stop_s > dt_grid.start_s)) {
        bad("dt_grid.stop_s", "must exceed dt_grid.start_s");
    }
    if (order != 1 && order != 2) bad("order", "must be 1 or 2");
    if (noon_n < 1) bad("noon_n", "must be >= 1");
    if (cutoff < noon_n + 2) bad("cutoff", "must be >= noon_n + 2");
    if (detector_mode != "threshold" && detector_mode != "number-resolving") {
        bad("detector_mode", "must be 'threshold' or 'number-resolving'");
    }
    if (herald_max_attempts < 1) bad("herald_max_attempts", "must be >= 1");
    return errs;
}

void ExperimentConfig::validate_or_throw() const {
    const auto errs = validate();
    if (errs.empty()) return;
    std::string msg = "invalid config:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
}

MotionParams ExperimentConfig::motion_params() const {
    MotionParams p;
    p.lambda_m = lambda_m;
    p.theta_rad = theta_rad;
    p.v0_mps = v0_mps;
    p.vp_mps = pump_velocity(pump_power_mw, pump_model);
    p.tau_s = tau_s;
    p.phi_stab_rad = phi_stab_rad;
    return p;
}

WriteParams ExperimentConfig::write_params() const { return WriteParams{chi, cutoff}; }

std::vector<double> ExperimentConfig::grid() const {
    std::vector<double> g(static_cast<std::size_t>(dt_grid.count));
    if (dt_grid.count == 1) {
        g[0] = dt_grid.start_s;
        return g;
    }
    const double step = (dt_grid.stop_s - dt_grid.start_s) / (dt_grid.count - 1);
    for (int i = 0; i < dt_grid.count; ++i) g[static_cast<std::size_t>(i)] = dt_grid.start_s + step * i;
    return g;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::metadata() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("chi", format_g17(chi));
    kv.emplace_back("cutoff", std::to_string(cutoff));
    kv.emplace_back("lambda_m", format_g17(lambda_m));
    kv.emplace_back("theta_rad", format_g17(theta_rad));
    kv.emplace_back("v0_mps", format_g17(v0_mps));
    kv.emplace_back("pump_power_mw", format_g17(pump_power_mw));
    kv.emplace_back("pump_model.v_max_mps", format_g17(pump_model.v_max_mps));
    kv.emplace_back("pump_model.p_sat_mw", format_g17(pump_model.p_sat_mw));
    kv.emplace_back("tau_s", format_g17(tau_s));
    kv.emplace_back("gamma0", format_g17(gamma0));
    kv.emplace_back("gamma_b", format_g17(gamma_b));
    kv.emplace_back("phi_stab_rad", format_g17(phi_stab_rad));
    kv.emplace_back("trials_per_point", std::to_string(trials_per_point));
    kv.emplace_back("dt_grid.start_s", format_g17(dt_grid.start_s));
    kv.emplace_back("dt_grid.stop_s", format_g17(dt_grid.stop_s));
    kv.emplace_back("dt_grid.count", std::to_string(dt_grid.count));
    kv.emplace_back("order", std::to_string(order));
    kv.emplace_back("noon_n", std::to_string(noon_n));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("detector_mode", detector_mode);
    kv.emplace_back("herald_max_attempts", std::to_string(herald_max_attempts));
    return kv;
}

ExperimentConfig default_config() { return ExperimentConfig{}; }

namespace {

// Reads a field if present; type errors carry the field name.
template <typename T>
void get_field(const json& j, const std::string& key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "chi",    "cutoff",   "lambda_m",  "theta_rad",        "v0_mps",
        "pump_power_mw",      "pump_model", "tau_s",           "gamma0",
        "gamma_b", "phi_stab_rad",          "trials_per_point", "dt_grid",
        "order",  "noon_n",   "seed",      "detector_mode",    "herald_max_attempts"};
    return keys;
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
            throw ConfigError(key + ": unknown config field");
        }
    }

    ExperimentConfig cfg;
    get_field(j, "chi", cfg.chi);
    get_field(j, "cutoff", cfg.cutoff);
    get_field(j, "lambda_m", cfg.lambda_m);
    get_field(j, "theta_rad", cfg.theta_rad);
    get_field(j, "v0_mps", cfg.v0_mps);
    get_field(j, "pump_power_mw", cfg.pump_power_mw);
    if (j.contains("pump_model")) {
        const auto& pm = j.at("pump_model");
        if (!pm.is_object()) throw ConfigError("pump_model: must be an object");
        get_field(pm, "v_max_mps", cfg.pump_model.v_max_mps);
        get_field(pm, "p_sat_mw", cfg.pump_model.p_sat_mw);
    }
    get_field(j, "tau_s", cfg.tau_s);
    get_field(j, "gamma0", cfg.gamma0);
    get_field(j, "gamma_b", cfg.gamma_b);
    get_field(j, "phi_stab_rad", cfg.phi_stab_rad);
    get_field(j, "trials_per_point", cfg.trials_per_point);
    if (j.contains("dt_grid")) {
        const auto& g = j.at("dt_grid");
        if (!g.is_object()) throw ConfigError("dt_grid: must be an object");
        get_field(g, "start_s", cfg.dt_grid.start_s);
        get_field(g, "stop_s", cfg.dt_grid.stop_s);
        get_field(g, "count", cfg.dt_grid.count);
    }
    get_field(j, "order", cfg.order);
    get_field(j, "noon_n", cfg.noon_n);
    get_field(j, "seed", cfg.seed);
    get_field(j, "detector_mode", cfg.detector_mode);
    get_field(j, "herald_max_attempts", cfg.herald_max_attempts);
    cfg.validate_or_throw();
    return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["chi"] = cfg.chi;
    j["cutoff"] = cfg.cutoff;
    j["lambda_m"] = cfg.lambda_m;
    j["theta_rad"] = cfg.theta_rad;
    j["v0_mps"] = cfg.v0_mps;
    j["pump_power_mw"] = cfg.pump_power_mw;
    j["pump_model"]["v_max_mps"] = cfg.pump_model.v_max_mps;
    j["pump_model"]["p_sat_mw"] = cfg.pump_model.p_sat_mw;
    j["tau_s"] = cfg.tau_s;
    j["gamma0"] = cfg.gamma0;
    j["gamma_b"] = cfg.gamma_b;
    j["phi_stab_rad"] = cfg.phi_stab_rad;
    j["trials_per_point"] = cfg.trials_per_point;
    j["dt_grid"]["start_s"] = cfg.dt_grid.start_s;
    j["dt_grid"]["stop_s"] = cfg.dt_grid.stop_s;
    j["dt_grid"]["count"] = cfg.dt_grid.count;
    j["order"] = cfg.order;
    j["noon_n"] = cfg.noon_n;
    j["seed"] = cfg.seed;
    j["detector_mode"] = cfg.detector_mode;
    j["herald_max_attempts"] = cfg.herald_max_attempts;
    return j.dump(2) + "\n";
}

void apply_override(std::string& json_text, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--set expects key=value, got: " + assignment);
    }
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    json parsed_value;
    try {
        parsed_value = json::parse(value);
    } catch (const json::exception&) {
        parsed_value = value;  // bare strings stay strings
    }

    json* node = &j;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
        if (part.empty()) throw ConfigError("--set: empty key segment in " + key);
        if (dot == std::string::npos) {
            (*node)[part] = parsed_value;
            break;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
    json_text = j.dump();
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::string text;
    if (path.empty()) {
        text = config_to_json_text(default_config());
    } else {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    for (const auto& o : overrides) apply_override(text, o);
    if (const char* env = std::getenv("SWNOON_SEED")) {
        apply_override(text, std::string("seed=") + env);
    }
    return config_from_json_text(text);
}

}  // namespace swnoon
