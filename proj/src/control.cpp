// SPDX-License-Identifier: Apache-2.0

#include "everkin/control.hpp"

#include <algorithm>
#include <cmath>

#include "everkin/angles.hpp"
#include "everkin/errors.hpp"
#include "everkin/kinematics.hpp"

namespace everkin::control {

void PidGains::validate() const {
    if (!(kp >= 0.0) || !std::isfinite(kp) || !(ki >= 0.0) || !std::isfinite(ki) ||
        !(kd >= 0.0) || !std::isfinite(kd))
        throw OutOfRange("pid gains must be finite and >= 0");
    if (!(integral_limit >= 0.0) || !std::isfinite(integral_limit))
        throw OutOfRange("integral limit must be finite and >= 0");
    if (!(output_limit > 0.0) || !std::isfinite(output_limit))
        throw OutOfRange("output limit must be finite and > 0");
}

PidChannel::PidChannel(const PidGains& gains) : gains_(gains) {
    gains_.validate();
}

double PidChannel::update(double error, double dt, double bias) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw OutOfRange("dt must be > 0");

    double derivative = primed_ ? error - prev_error_ : 0.0;
    double raw = gains_.kp * error + gains_.ki * integral_ +
                 gains_.kd * derivative + bias;
    double out = std::clamp(raw, 0.0, gains_.output_limit);

    bool into_clamp = (raw > gains_.output_limit && error > 0.0) ||
                      (raw < 0.0 && error < 0.0);
    if (!into_clamp) {
        integral_ = std::clamp(integral_ + error * dt, -gains_.integral_limit,
                               gains_.integral_limit);
    }
    prev_error_ = error;
    primed_ = true;
    return out;
}

void PidChannel::reset() {
    integral_ = 0.0;
    prev_error_ = 0.0;
    primed_ = false;
}

Controller::Controller(const GainConfig& gains, ModelCoefficient model_k,
                       bool feedforward)
    : gains_(gains),
      k_(model_k),
      ff_(feedforward),
      length_ch_(gains.length),
      steer_ch_{PidChannel(gains.steering), PidChannel(gains.steering),
                PidChannel(gains.steering)} {}

const PolarPose& Controller::set_target(const CartesianPoint& target) {
    PolarPose pose = kinematics::cartesian_to_polar(target);
    set_target_pose(pose);
    return target_;
}

void Controller::set_target_pose(const PolarPose& target) {
    if (target.alpha() > kinematics::kMaxModelPitchDeg)
        throw OutOfRange("target pitch exceeds the 90 deg steering ceiling");
    target_ = target;
    target_in_ws_ = kinematics::in_workspace(target);
}

ControlError Controller::pose_error(const PolarPose& measured,
                                    bool theta_defined) const {
    ControlError e;
    e.e_R = target_.R() - measured.R();
    e.e_alpha = target_.alpha() - measured.alpha();
    e.theta_valid = theta_defined;
    e.e_theta = theta_defined ? wrap_diff(target_.theta(), measured.theta()) : 0.0;
    return e;
}

MotorAngles Controller::measured_equivalent(const PolarPose& measured,
                                            bool theta_defined) const {
    if (!theta_defined || measured.alpha() == 0.0) return {};
    // Transients can push the modeled pose past the steering ceiling;
    // map those onto the boundary rather than failing the inverse.
    double alpha = std::min(measured.alpha(), kinematics::kMaxModelPitchDeg);
    return kinematics::inverse_model(alpha, measured.theta(), k_);
}

plant::MotorCommand Controller::update(const PolarPose& measured,
                                       bool theta_defined, double dt) {
    ControlError e = pose_error(measured, theta_defined);
    double mu_R = length_ch_.update(e.e_R, dt, measured.R());

    MotorAngles desired_phi =
        kinematics::inverse_model(target_.alpha(), target_.theta(), k_);
    MotorAngles measured_phi = measured_equivalent(measured, theta_defined);

    std::array<double, 3> mu{};
    for (int i = 0; i < 3; ++i) {
        double err = desired_phi.values()[i] - measured_phi.values()[i];
        double bias = ff_ ? desired_phi.values()[i] : 0.0;
        mu[i] = steer_ch_[i].update(err, dt, bias);
    }
    // The desired sector's idle motor must stay slack; its loop still ran
    // so its integrator keeps unwinding through the clamp logic.
    mu[kinematics::sector_of(target_.theta()).idle - 1] = 0.0;

    return {mu_R, MotorAngles(mu[0], mu[1], mu[2])};
}

void Controller::reset() {
    length_ch_.reset();
    for (auto& ch : steer_ch_) ch.reset();
}

RunLog run_closed_loop(const plant::PlantState& initial, Controller& ctrl,
                       const plant::PlantConfig& plant_cfg, double duration,
                       double dt) {
    if (!(dt > 0.0 && dt <= 0.1)) throw OutOfRange("dt must be in (0, 0.1] s");
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw OutOfRange("duration must be > 0");

    auto ticks = static_cast<long long>(std::ceil(duration / dt - 1e-9));
    if (ticks < 1) ticks = 1;

    RunLog log;
    log.rows.reserve(static_cast<std::size_t>(ticks));
    plant::PlantState s = initial;
    for (long long n = 0; n < ticks; ++n) {
        plant::MotorCommand cmd = ctrl.update(s.measured, s.theta_defined, dt);
        ControlError e = ctrl.pose_error(s.measured, s.theta_defined);

        RunLogRow row;
        row.time_s = s.time_s;
        row.R_des = ctrl.target().R();
        row.alpha_des = ctrl.target().alpha();
        row.theta_des = ctrl.target().theta();
        row.R_real = s.measured.R();
        row.alpha_real = s.measured.alpha();
        row.theta_real = s.measured.theta();
        row.mu_R = cmd.mu_R;
        row.mu_phi = cmd.mu_phi.values();
        row.phi = s.motors.values();
        row.e_R = e.e_R;
        row.e_alpha = e.e_alpha;
        row.e_theta = e.e_theta;
        row.flags = (s.theta_defined ? 0u : kFlagThetaUndefined) |
                    (s.command_clamped ? kFlagCommandClamped : 0u) |
                    (ctrl.target_in_workspace() ? 0u : kFlagTargetOutOfWorkspace) |
                    (s.buckled ? kFlagBuckled : 0u);
        log.rows.push_back(row);

        s = plant::step(s, cmd, dt, plant_cfg);
    }
    return log;
}

SettlingMetrics settling_metrics(const RunLog& log, double band_fraction) {
    if (log.rows.empty()) throw InsufficientData("run log has no rows");
    if (!(band_fraction > 0.0) || !std::isfinite(band_fraction))
        throw OutOfRange("band fraction must be > 0");

    const RunLogRow& first = log.rows.front();
    const RunLogRow& last = log.rows.back();

    bool theta_active = last.alpha_des > 0.0;
    double change_R = std::abs(last.R_des - first.R_real);
    double change_alpha = std::abs(last.alpha_des - first.alpha_real);
    double change_theta = 180.0;  // worst case when the start has no rotation
    if (first.flags & kFlagThetaUndefined) {
        if (!theta_active) change_theta = 0.0;
    } else {
        change_theta = std::abs(wrap_diff(last.theta_des, first.theta_real));
    }

    constexpr double kBandFloor = 1e-9;
    double band_R = std::max(band_fraction * change_R, kBandFloor);
    double band_alpha = std::max(band_fraction * change_alpha, kBandFloor);
    double band_theta = std::max(band_fraction * change_theta, kBandFloor);

    auto in_band = [&](const RunLogRow& r) {
        if (std::abs(r.e_R) > band_R) return false;
        if (std::abs(r.e_alpha) > band_alpha) return false;
        if (theta_active) {
            if (r.flags & kFlagThetaUndefined) return false;
            if (std::abs(r.e_theta) > band_theta) return false;
        }
        return true;
    };

    SettlingMetrics m;
    std::size_t settled_from = log.rows.size();
    for (std::size_t i = log.rows.size(); i-- > 0;) {
        if (in_band(log.rows[i]))
            settled_from = i;
        else
            break;
    }
    if (settled_from < log.rows.size())
        m.settling_time = log.rows[settled_from].time_s - first.time_s;

    std::size_t tail = std::max<std::size_t>(1, log.rows.size() / 10);
    double sum_R = 0.0, sum_alpha = 0.0, sum_theta = 0.0;
    for (std::size_t i = log.rows.size() - tail; i < log.rows.size(); ++i) {
        const RunLogRow& r = log.rows[i];
        sum_R += std::abs(r.e_R);
        sum_alpha += std::abs(r.e_alpha);
        if (theta_active)
            sum_theta += (r.flags & kFlagThetaUndefined) ? 180.0 : std::abs(r.e_theta);
    }
    m.sse_R = sum_R / static_cast<double>(tail);
    m.sse_alpha = sum_alpha / static_cast<double>(tail);
    m.sse_theta = sum_theta / static_cast<double>(tail);
    return m;
}

}  // namespace everkin::control
