// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "everkin/types.hpp"

namespace everkin::plant {

// Knobs of the simulated arm. Defaults describe the reference build; the
// speed/payload slopes are stored as exact IEEE ratios of the anchor
// points so the anchors reproduce bit-exactly.
struct PlantConfig {
    double pressure_psi = 8.0;               // working pressure, (0, 10]
    double extension_speed_ref = 0.27;       // m/s at the 8 psi reference
    double retraction_speed = 0.25;          // m/s, pressure-independent
    double steering_rate = 90.0;             // deg/s shaft slew limit
    double payload_per_psi = 1.4 / 10.0;     // kg of tip load per psi
    double sag_magnitude = 6.0;              // deg of pitch added by gravity
    double sag_direction = 270.0;            // deg, straight down
    ModelCoefficient k_true{};               // coefficient of the real arm

    void validate() const;  // throws OutOfRange on a bad field
};

// Position targets sent to the actuators each tick: an absolute length for
// the center motor and absolute shaft angles for the steering motors.
struct MotorCommand {
    double mu_R = 0.0;
    MotorAngles mu_phi{};
};

struct PlantState {
    double time_s = 0.0;
    double length = 0.0;
    MotorAngles motors{};
    double payload_kg = 0.0;
    // What the tracking system reports: forward model of `motors` with
    // gravity sag applied. Kept consistent by make_state()/step().
    PolarPose measured{0.0, 0.0, 0.0};
    bool theta_defined = false;
    // Diagnostics from the last step.
    bool command_clamped = false;
    bool buckled = false;
};

// Tip speed when extending, scaled linearly with pressure from the
// reference point.
double extension_speed(const PlantConfig& cfg);

// Largest tip payload the arm can carry without buckling.
double max_payload(const PlantConfig& cfg);

// True when the current payload exceeds capacity; a buckled arm refuses
// to extend (retraction and steering still work).
bool check_buckling(const PlantState& state, const PlantConfig& cfg);

// Gravity deflection: the pose's (alpha, theta) and the sag vector add in
// deflection space (polar vectors of magnitude alpha). Returns the
// deflected angles; theta_defined is false when the sum cancels to the
// straight axis.
PoseAngles apply_sag(double alpha_deg, double theta_deg, const PlantConfig& cfg);

// Builds a consistent state snapshot (measured pose included).
PlantState make_state(const PlantConfig& cfg, double length = 0.0,
                      const MotorAngles& motors = {}, double payload_kg = 0.0,
                      double time_s = 0.0);

// Advances the plant by dt seconds (0 < dt <= 0.1, OutOfRange otherwise)
// toward the commanded targets, honoring per-actuator speed limits,
// buckling, and the two-motor actuation rule. Commands outside [0,
// kMaxReachM] for length are clamped and flagged. Pure function of its
// arguments.
PlantState step(const PlantState& state, const MotorCommand& cmd, double dt,
                const PlantConfig& cfg);

}  // namespace everkin::plant
