// SPDX-License-Identifier: Apache-2.0

#include "everkin/config.hpp"

#include <cmath>
#include <fstream>

#include "everkin/errors.hpp"

namespace everkin::harness {

namespace {

using nlohmann::json;

double as_number(const json& v, const std::string& path) {
    if (!v.is_number())
        throw ConfigError("expected a number", path);
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("number must be finite", path);
    return d;
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer())
        throw ConfigError("expected an integer", path);
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError("expected a boolean", path);
    return v.get<bool>();
}

std::vector<double> as_number_array(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty())
        throw ConfigError("expected a non-empty array of numbers", path);
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void require_object(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError("expected an object", path);
}

void bind_plant(const json& j, const std::string& path, plant::PlantConfig& out) {
    require_object(j, path);
    for (const auto& [key, val] : j.items()) {
        std::string p = path + "." + key;
        if (key == "pressure_psi") out.pressure_psi = as_number(val, p);
        else if (key == "extension_speed_ref") out.extension_speed_ref = as_number(val, p);
        else if (key == "retraction_speed") out.retraction_speed = as_number(val, p);
        else if (key == "steering_rate") out.steering_rate = as_number(val, p);
        else if (key == "payload_per_psi") out.payload_per_psi = as_number(val, p);
        else if (key == "sag_magnitude") out.sag_magnitude = as_number(val, p);
        else if (key == "sag_direction") out.sag_direction = as_number(val, p);
        else if (key == "k_true") out.k_true = ModelCoefficient(as_number(val, p));
        else throw ConfigError("unknown key", p);
    }
}

void bind_gains(const json& j, const std::string& path, control::PidGains& out) {
    require_object(j, path);
    for (const auto& [key, val] : j.items()) {
        std::string p = path + "." + key;
        if (key == "kp") out.kp = as_number(val, p);
        else if (key == "ki") out.ki = as_number(val, p);
        else if (key == "kd") out.kd = as_number(val, p);
        else if (key == "integral_limit") out.integral_limit = as_number(val, p);
        else if (key == "output_limit") out.output_limit = as_number(val, p);
        else throw ConfigError("unknown key", p);
    }
}

void bind_loop(const json& j, const std::string& path, LoopConfig& out) {
    require_object(j, path);
    for (const auto& [key, val] : j.items()) {
        std::string p = path + "." + key;
        if (key == "dt") out.dt = as_number(val, p);
        else if (key == "duration") out.duration = as_number(val, p);
        else if (key == "feedforward") out.feedforward = as_bool(val, p);
        else throw ConfigError("unknown key", p);
    }
}

void bind_grid(const json& j, const std::string& path, GridConfig& out) {
    require_object(j, path);
    for (const auto& [key, val] : j.items()) {
        std::string p = path + "." + key;
        if (key == "r_min") out.r_min = as_number(val, p);
        else if (key == "r_max") out.r_max = as_number(val, p);
        else if (key == "r_steps") out.r_steps = as_int(val, p);
        else if (key == "alpha_min") out.alpha_min = as_number(val, p);
        else if (key == "alpha_max") out.alpha_max = as_number(val, p);
        else if (key == "alpha_steps") out.alpha_steps = as_int(val, p);
        else if (key == "theta_steps") out.theta_steps = as_int(val, p);
        else throw ConfigError("unknown key", p);
    }
}

void bind_experiment(const json& j, const std::string& path, ExperimentConfig& out) {
    require_object(j, path);
    for (const auto& [key, val] : j.items()) {
        std::string p = path + "." + key;
        if (key == "target") {
            auto xyz = as_number_array(val, p);
            if (xyz.size() != 3)
                throw ConfigError("expected [x, y, z]", p);
            out.target = {xyz[0], xyz[1], xyz[2]};
        } else if (key == "alpha_levels") out.alpha_levels = as_number_array(val, p);
        else if (key == "theta_step_deg") out.theta_step_deg = as_number(val, p);
        else if (key == "arm_length_m") out.arm_length_m = as_number(val, p);
        else if (key == "pressures_psi") out.pressures_psi = as_number_array(val, p);
        else if (key == "lengths_m") out.lengths_m = as_number_array(val, p);
        else if (key == "samples_per_condition") out.samples_per_condition = as_int(val, p);
        else if (key == "noise_sigma_deg") out.noise_sigma_deg = as_number(val, p);
        else if (key == "phi_min_deg") out.phi_min_deg = as_number(val, p);
        else if (key == "phi_max_deg") out.phi_max_deg = as_number(val, p);
        else if (key == "grid") bind_grid(val, p, out.grid);
        else throw ConfigError("unknown key", p);
    }
}

}  // namespace

void LoopConfig::validate() const {
    if (!(dt > 0.0 && dt <= 0.1)) throw ConfigError("dt must be in (0, 0.1]", "loop.dt");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw ConfigError("duration must be > 0", "loop.duration");
}

void GridConfig::validate() const {
    if (!(r_min >= 0.0 && r_max >= r_min))
        throw ConfigError("need 0 <= r_min <= r_max", "experiment.grid");
    if (!(alpha_min >= 0.0 && alpha_max >= alpha_min && alpha_max <= 180.0))
        throw ConfigError("need 0 <= alpha_min <= alpha_max <= 180", "experiment.grid");
    if (r_steps < 1 || alpha_steps < 1 || theta_steps < 1)
        throw ConfigError("grid steps must be >= 1", "experiment.grid");
}

void ExperimentConfig::validate() const {
    if (alpha_levels.empty())
        throw ConfigError("need at least one level", "experiment.alpha_levels");
    for (double a : alpha_levels)
        if (!(a > 0.0 && a <= kinematics::kMaxModelPitchDeg))
            throw ConfigError("levels must be in (0, 90]", "experiment.alpha_levels");
    if (!(theta_step_deg > 0.0 && theta_step_deg <= 120.0))
        throw ConfigError("step must be in (0, 120]", "experiment.theta_step_deg");
    if (!(arm_length_m > 0.0 && arm_length_m <= kinematics::kMaxReachM))
        throw ConfigError("length must be in (0, max reach]", "experiment.arm_length_m");
    for (double p : pressures_psi)
        if (!(p > 0.0 && p <= 10.0))
            throw ConfigError("pressures must be in (0, 10]", "experiment.pressures_psi");
    for (double l : lengths_m)
        if (!(l > 0.0) || !std::isfinite(l))
            throw ConfigError("lengths must be > 0", "experiment.lengths_m");
    if (samples_per_condition < 2)
        throw ConfigError("need >= 2 samples", "experiment.samples_per_condition");
    if (!(noise_sigma_deg >= 0.0) || !std::isfinite(noise_sigma_deg))
        throw ConfigError("sigma must be >= 0", "experiment.noise_sigma_deg");
    if (!(phi_min_deg > 0.0 && phi_max_deg > phi_min_deg))
        throw ConfigError("need 0 < phi_min < phi_max", "experiment.phi_min_deg");
    grid.validate();
}

void Config::validate() const {
    try {
        plant.validate();
    } catch (const OutOfRange& e) {
        throw ConfigError(e.what(), "plant");
    }
    if (!(payload_kg >= 0.0) || !std::isfinite(payload_kg))
        throw ConfigError("payload must be >= 0", "payload_kg");
    try {
        gains.steering.validate();
    } catch (const OutOfRange& e) {
        throw ConfigError(e.what(), "gains.steering");
    }
    try {
        gains.length.validate();
    } catch (const OutOfRange& e) {
        throw ConfigError(e.what(), "gains.length");
    }
    loop.validate();
    experiment.validate();
    if (!(model_k > 0.0) || !std::isfinite(model_k))
        throw ConfigError("model coefficient must be > 0", "model_k");
}

Config config_from_json(const nlohmann::json& root) {
    require_object(root, "$");
    Config cfg;
    for (const auto& [key, val] : root.items()) {
        if (key == "plant") bind_plant(val, key, cfg.plant);
        else if (key == "payload_kg") cfg.payload_kg = as_number(val, key);
        else if (key == "gains") {
            require_object(val, key);
            for (const auto& [gkey, gval] : val.items()) {
                if (gkey == "steering") bind_gains(gval, "gains.steering", cfg.gains.steering);
                else if (gkey == "length") bind_gains(gval, "gains.length", cfg.gains.length);
                else throw ConfigError("unknown key", "gains." + gkey);
            }
        } else if (key == "loop") bind_loop(val, key, cfg.loop);
        else if (key == "experiment") bind_experiment(val, key, cfg.experiment);
        else if (key == "model_k") cfg.model_k = as_number(val, key);
        else if (key == "seed") {
            if (!val.is_number_unsigned())
                throw ConfigError("expected a non-negative integer", key);
            cfg.seed = val.get<std::uint64_t>();
        } else throw ConfigError("unknown key", key);
    }
    cfg.validate();
    return cfg;
}

nlohmann::json config_to_json(const Config& cfg) {
    nlohmann::json j;
    j["plant"] = {{"pressure_psi", cfg.plant.pressure_psi},
                  {"extension_speed_ref", cfg.plant.extension_speed_ref},
                  {"retraction_speed", cfg.plant.retraction_speed},
                  {"steering_rate", cfg.plant.steering_rate},
                  {"payload_per_psi", cfg.plant.payload_per_psi},
                  {"sag_magnitude", cfg.plant.sag_magnitude},
                  {"sag_direction", cfg.plant.sag_direction},
                  {"k_true", cfg.plant.k_true.value()}};
    j["payload_kg"] = cfg.payload_kg;
    auto gains_json = [](const control::PidGains& g) {
        return nlohmann::json{{"kp", g.kp},
                              {"ki", g.ki},
                              {"kd", g.kd},
                              {"integral_limit", g.integral_limit},
                              {"output_limit", g.output_limit}};
    };
    j["gains"] = {{"steering", gains_json(cfg.gains.steering)},
                  {"length", gains_json(cfg.gains.length)}};
    j["loop"] = {{"dt", cfg.loop.dt},
                 {"duration", cfg.loop.duration},
                 {"feedforward", cfg.loop.feedforward}};
    j["experiment"] = {
        {"target", {cfg.experiment.target.x, cfg.experiment.target.y,
                    cfg.experiment.target.z}},
        {"alpha_levels", cfg.experiment.alpha_levels},
        {"theta_step_deg", cfg.experiment.theta_step_deg},
        {"arm_length_m", cfg.experiment.arm_length_m},
        {"pressures_psi", cfg.experiment.pressures_psi},
        {"lengths_m", cfg.experiment.lengths_m},
        {"samples_per_condition", cfg.experiment.samples_per_condition},
        {"noise_sigma_deg", cfg.experiment.noise_sigma_deg},
        {"phi_min_deg", cfg.experiment.phi_min_deg},
        {"phi_max_deg", cfg.experiment.phi_max_deg},
        {"grid",
         {{"r_min", cfg.experiment.grid.r_min},
          {"r_max", cfg.experiment.grid.r_max},
          {"r_steps", cfg.experiment.grid.r_steps},
          {"alpha_min", cfg.experiment.grid.alpha_min},
          {"alpha_max", cfg.experiment.grid.alpha_max},
          {"alpha_steps", cfg.experiment.grid.alpha_steps},
          {"theta_steps", cfg.experiment.grid.theta_steps}}}};
    j["model_k"] = cfg.model_k;
    j["seed"] = cfg.seed;
    return j;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(j);
}

std::string config_snapshot(const Config& cfg) {
    return config_to_json(cfg).dump();
}

}  // namespace everkin::harness
