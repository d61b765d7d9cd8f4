// SPDX-License-Identifier: Apache-2.0

#include "everkin/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "everkin/angles.hpp"
#include "everkin/errors.hpp"
#include "everkin/kinematics.hpp"

namespace everkin::plant {

namespace {

double move_toward(double x, double target, double max_step) {
    if (target > x) return std::min(target, x + max_step);
    if (target < x) return std::max(target, x - max_step);
    return x;
}

}  // namespace

void PlantConfig::validate() const {
    if (!(pressure_psi > 0.0 && pressure_psi <= 10.0))
        throw OutOfRange("pressure must be in (0, 10] psi");
    if (!(extension_speed_ref > 0.0) || !std::isfinite(extension_speed_ref))
        throw OutOfRange("extension speed reference must be > 0");
    if (!(retraction_speed > 0.0) || !std::isfinite(retraction_speed))
        throw OutOfRange("retraction speed must be > 0");
    if (!(steering_rate > 0.0) || !std::isfinite(steering_rate))
        throw OutOfRange("steering rate must be > 0");
    if (!(payload_per_psi >= 0.0) || !std::isfinite(payload_per_psi))
        throw OutOfRange("payload slope must be >= 0");
    if (!(sag_magnitude >= 0.0) || !std::isfinite(sag_magnitude))
        throw OutOfRange("sag magnitude must be >= 0");
    if (!std::isfinite(sag_direction))
        throw OutOfRange("sag direction must be finite");
}

double extension_speed(const PlantConfig& cfg) {
    return cfg.extension_speed_ref * (cfg.pressure_psi / 8.0);
}

double max_payload(const PlantConfig& cfg) {
    return cfg.payload_per_psi * cfg.pressure_psi;
}

bool check_buckling(const PlantState& state, const PlantConfig& cfg) {
    return state.payload_kg > max_payload(cfg);
}

PoseAngles apply_sag(double alpha_deg, double theta_deg, const PlantConfig& cfg) {
    if (!(alpha_deg >= 0.0) || !std::isfinite(alpha_deg))
        throw OutOfRange("pitch must be finite and >= 0");
    if (cfg.sag_magnitude == 0.0)
        return {alpha_deg, wrap360(theta_deg), alpha_deg > 0.0};

    // Deflections add as polar vectors of magnitude alpha in the
    // (cos theta, sin theta) plane.
    double st, ct, sd, cd;
    sincosd(theta_deg, st, ct);
    sincosd(cfg.sag_direction, sd, cd);
    double vy = alpha_deg * ct + cfg.sag_magnitude * cd;
    double vz = alpha_deg * st + cfg.sag_magnitude * sd;
    double mag = std::hypot(vy, vz);
    if (mag == 0.0) return {0.0, 0.0, false};
    return {mag, wrap360(atan2d(vz, vy)), true};
}

PlantState make_state(const PlantConfig& cfg, double length,
                      const MotorAngles& motors, double payload_kg,
                      double time_s) {
    cfg.validate();
    if (!(length >= 0.0) || !std::isfinite(length))
        throw OutOfRange("length must be finite and >= 0");
    if (!(payload_kg >= 0.0) || !std::isfinite(payload_kg))
        throw OutOfRange("payload must be finite and >= 0");

    PlantState s;
    s.time_s = time_s;
    s.length = length;
    s.motors = motors;
    s.payload_kg = payload_kg;

    PoseAngles fw = kinematics::forward_model(motors, cfg.k_true);
    PoseAngles sagged = apply_sag(fw.alpha, fw.theta, cfg);
    // The arm physically cannot pitch past doubling back on itself.
    double alpha = std::min(sagged.alpha, 180.0);
    s.measured = PolarPose(length, alpha, sagged.theta);
    s.theta_defined = sagged.theta_defined;
    s.buckled = check_buckling(s, cfg);
    return s;
}

PlantState step(const PlantState& state, const MotorCommand& cmd, double dt,
                const PlantConfig& cfg) {
    cfg.validate();
    if (!(dt > 0.0 && dt <= 0.1))
        throw OutOfRange("dt must be in (0, 0.1] s");

    bool clamped = false;

    double length_target = cmd.mu_R;
    if (length_target < 0.0) {
        length_target = 0.0;
        clamped = true;
    } else if (length_target > kinematics::kMaxReachM) {
        length_target = kinematics::kMaxReachM;
        clamped = true;
    }

    bool buckled = check_buckling(state, cfg);
    double length = state.length;
    if (length_target > length) {
        if (!buckled)
            length = move_toward(length, length_target, extension_speed(cfg) * dt);
    } else {
        length = move_toward(length, length_target, cfg.retraction_speed * dt);
    }

    // Slew each shaft toward its target, but hold motors that are winding
    // up from zero until every motor releasing to zero has arrived there;
    // independent slewing would transit through three-engaged states,
    // which the cable layout cannot realize.
    const auto& phi = state.motors.values();
    const auto& tgt = cmd.mu_phi.values();
    bool releasing_pending = false;
    for (int i = 0; i < 3; ++i)
        if (phi[i] > 0.0 && tgt[i] == 0.0) releasing_pending = true;

    std::array<double, 3> next{};
    double max_step = cfg.steering_rate * dt;
    for (int i = 0; i < 3; ++i) {
        if (phi[i] == 0.0 && tgt[i] > 0.0 && releasing_pending)
            next[i] = 0.0;
        else
            next[i] = move_toward(phi[i], tgt[i], max_step);
    }

    PlantState out;
    out.time_s = state.time_s + dt;
    out.length = length;
    out.motors = MotorAngles(next[0], next[1], next[2]);
    out.payload_kg = state.payload_kg;

    PoseAngles fw = kinematics::forward_model(out.motors, cfg.k_true);
    PoseAngles sagged = apply_sag(fw.alpha, fw.theta, cfg);
    double alpha = sagged.alpha;
    if (alpha > 180.0) {
        alpha = 180.0;
        clamped = true;
    }
    out.measured = PolarPose(length, alpha, sagged.theta);
    out.theta_defined = sagged.theta_defined;
    out.command_clamped = clamped;
    out.buckled = buckled;
    return out;
}

}  // namespace everkin::plant
