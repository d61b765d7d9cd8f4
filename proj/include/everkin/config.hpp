// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "everkin/control.hpp"
#include "everkin/kinematics.hpp"
#include "everkin/plant.hpp"
#include "everkin/types.hpp"

#include <json.hpp>

namespace everkin::harness {

struct LoopConfig {
    double dt = 1.0 / 120.0;  // tick length; the gains are tuned for 120 Hz
    double duration = 60.0;
    bool feedforward = true;

    void validate() const;
};

// Sample grid of the workspace map. A range [lo, hi] with n steps yields
// n+1 values inclusive of both ends; rotation covers [0, 360) exclusive.
struct GridConfig {
    double r_min = 0.2, r_max = 1.3;
    int r_steps = 11;
    double alpha_min = 0.0, alpha_max = 66.0;
    int alpha_steps = 22;
    int theta_steps = 24;

    void validate() const;
};

struct ExperimentConfig {
    // step response target (sim and the step comparison)
    CartesianPoint target =
        kinematics::polar_to_cartesian(PolarPose(1.0, 30.0, 45.0));
    // rotation sweep
    std::vector<double> alpha_levels{10.4, 20.8, 31.2};
    double theta_step_deg = 1.0;
    double arm_length_m = 1.12;
    // synthetic coefficient-calibration sweeps
    std::vector<double> pressures_psi{3.0, 6.0, 9.0};
    std::vector<double> lengths_m{0.6, 1.12};
    int samples_per_condition = 200;
    double noise_sigma_deg = 0.2;
    double phi_min_deg = 50.0, phi_max_deg = 450.0;
    GridConfig grid{};

    void validate() const;
};

struct Config {
    plant::PlantConfig plant{};
    double payload_kg = 0.0;  // load hung on the tip at t = 0
    control::GainConfig gains{};
    LoopConfig loop{};
    ExperimentConfig experiment{};
    double model_k = ModelCoefficient::kDefault;  // coefficient the controller assumes
    std::uint64_t seed = 42;

    void validate() const;
};

// Strict JSON binding: every key is optional (the C++ defaults above are
// the source of truth), but unknown keys and wrong types are rejected with
// the offending dotted path in the error. Numbers must be finite.
Config config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Config& cfg);

// Reads and binds a config file; ConfigError on bad content, Error with
// errno text when the file cannot be read.
Config load_config(const std::filesystem::path& path);

// One-line snapshot embedded in run logs; key-sorted, shortest doubles,
// so identical configs serialize identically.
std::string config_snapshot(const Config& cfg);

}  // namespace everkin::harness
