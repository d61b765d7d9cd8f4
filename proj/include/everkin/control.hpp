// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>

#include "everkin/plant.hpp"
#include "everkin/runlog.hpp"
#include "everkin/types.hpp"

namespace everkin::control {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double integral_limit = 0.0;  // cap on |accumulated error|
    double output_limit = 0.0;    // command ceiling; the floor is always 0

    void validate() const;  // throws OutOfRange
};

// Loop stability at these gains: with the plant tracking commands
// directly, the error recursion is e' = -(kp + kd) e + kd e_prev, so the
// defaults need kp + 2 kd < 1. Keep that in mind when retuning.
inline constexpr PidGains kDefaultSteeringGains{0.8, 0.2, 0.05, 4000.0, 1200.0};
inline constexpr PidGains kDefaultLengthGains{0.6, 0.5, 0.0, 10.0, 1.2};

struct GainConfig {
    PidGains steering = kDefaultSteeringGains;
    PidGains length = kDefaultLengthGains;
};

// One discrete PID loop. The derivative is a per-sample difference (the
// gains are tuned at a fixed tick rate), the output is kp*e + ki*I +
// kd*(e - e_prev) + bias clamped to [0, output_limit], and the integral
// accumulates after the output forms, so the first call returns
// kp*e + bias exactly. Anti-windup is twofold: |I| is capped at
// integral_limit, and I is frozen whenever the pre-clamp output already
// sits past the active clamp in the error's direction.
class PidChannel {
public:
    explicit PidChannel(const PidGains& gains);

    double update(double error, double dt, double bias = 0.0);
    void reset();
    double integral() const { return integral_; }

private:
    PidGains gains_;
    double integral_ = 0.0;
    double prev_error_ = 0.0;
    bool primed_ = false;
};

// Pose error as the controller sees it. e_theta uses the shortest wrapped
// difference; it reads 0 with theta_valid = false when the measured
// rotation is undefined.
struct ControlError {
    double e_R = 0.0;
    double e_alpha = 0.0;
    double e_theta = 0.0;
    bool theta_valid = false;
};

// Position controller: one anchored PID on reach plus three decoupled
// motor-space PIDs on steering. Steering errors are formed between the
// motor angles that *would* produce the desired pose and those that would
// produce the measured one (inverse map of each); with feedforward on,
// the desired-pose motor angles are added as an exact bias, so a
// converged loop holds its command without integrator help.
class Controller {
public:
    Controller(const GainConfig& gains, ModelCoefficient model_k,
               bool feedforward);

    // Converts a Cartesian target to a pose target. The origin is
    // degenerate (DegenerateInput); pitches beyond the steering model's
    // 90 deg ceiling are OutOfRange. Targets outside the workspace
    // envelope are accepted but flagged.
    const PolarPose& set_target(const CartesianPoint& target);
    void set_target_pose(const PolarPose& target);

    const PolarPose& target() const { return target_; }
    bool target_in_workspace() const { return target_in_ws_; }
    bool feedforward() const { return ff_; }

    ControlError pose_error(const PolarPose& measured, bool theta_defined) const;

    // One control tick. Steering commands keep at most two motors engaged
    // (the desired sector's idle motor is forced to 0); the reach command
    // is anchored at the measured length.
    plant::MotorCommand update(const PolarPose& measured, bool theta_defined,
                               double dt);

    void reset();

private:
    MotorAngles measured_equivalent(const PolarPose& measured,
                                    bool theta_defined) const;

    GainConfig gains_;
    ModelCoefficient k_;
    bool ff_;
    PolarPose target_{0.0, 0.0, 0.0};
    bool target_in_ws_ = true;
    PidChannel length_ch_;
    std::array<PidChannel, 3> steer_ch_;
};

// Runs the controller against the simulated plant for ceil(duration/dt)
// ticks (at least one). Row n records the state at t_n together with the
// command computed from it; the plant then advances to t_n + dt.
RunLog run_closed_loop(const plant::PlantState& initial, Controller& ctrl,
                       const plant::PlantConfig& plant_cfg, double duration,
                       double dt);

// Settling/steady-state summary of a run. Per axis, the band is
// band_fraction of the total commanded change (floored at 1e-9);
// settling_time is the first instant after which every active axis stays
// in band, empty if the log never settles. sse_* are mean |e| over the
// final tenth of the log. The rotation axis is inactive when the final
// commanded pitch is 0 (rotation is meaningless on the axis); rows with
// undefined measured rotation count as out-of-band while it is active.
struct SettlingMetrics {
    std::optional<double> settling_time;
    double sse_R = 0.0;
    double sse_alpha = 0.0;
    double sse_theta = 0.0;
    double sse_steering() const { return sse_alpha + sse_theta; }
};

SettlingMetrics settling_metrics(const RunLog& log, double band_fraction = 0.05);

}  // namespace everkin::control
