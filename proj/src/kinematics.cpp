// SPDX-License-Identifier: Apache-2.0

#include "everkin/kinematics.hpp"

#include <cmath>

#include "everkin/angles.hpp"
#include "everkin/errors.hpp"
#include "everkin/kernels/core.hpp"

namespace everkin::kinematics {

SteeringSector sector_of(double theta_deg) {
    if (!std::isfinite(theta_deg)) throw OutOfRange("rotation must be finite");
    double w = wrap360(theta_deg);
    int s = static_cast<int>(w / 120.0);
    if (s > 2) s = 2;  // w just below 360 can round the quotient up
    static constexpr SteeringSector kSectors[3] = {
        {SectorId::S1, 0.0, 1, 2, 3},
        {SectorId::S2, 120.0, 2, 3, 1},
        {SectorId::S3, 240.0, 3, 1, 2},
    };
    return kSectors[s];
}

PoseAngles forward_model(const MotorAngles& motors, ModelCoefficient k) {
    const auto& p = motors.values();
    if (motors.all_zero()) return {0.0, 0.0, false};
    double alpha = k.value() * std::sqrt(kernels::forward_q(p[0], p[1], p[2]));
    double theta = kernels::forward_theta_raw(p[0], p[1], p[2]);
    return {alpha, theta, true};
}

MotorAngles inverse_model(double alpha_deg, double theta_deg, ModelCoefficient k) {
    if (!(alpha_deg >= 0.0 && alpha_deg <= kMaxModelPitchDeg))
        throw OutOfRange("pitch must be in [0, 90] deg");
    if (!std::isfinite(theta_deg)) throw OutOfRange("rotation must be finite");
    double p1, p2, p3;
    kernels::inverse_point(alpha_deg, wrap360(theta_deg), k.value(), p1, p2, p3);
    return {p1, p2, p3};
}

CartesianPoint polar_to_cartesian(const PolarPose& pose) {
    double sa, ca, st, ct;
    sincosd(pose.alpha(), sa, ca);
    sincosd(pose.theta(), st, ct);
    double lateral = pose.R() * sa;
    return {pose.R() * ca, lateral * ct, lateral * st};
}

PolarPose cartesian_to_polar(const CartesianPoint& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw OutOfRange("point coordinates must be finite");
    double lateral = std::hypot(p.y, p.z);
    double r = std::hypot(lateral, p.x);
    if (r == 0.0) throw DegenerateInput("the origin has no pitch/rotation");
    double alpha = atan2d(lateral, p.x);
    double theta = lateral == 0.0 ? 0.0 : wrap360(atan2d(p.z, p.y));
    return {r, alpha, theta};
}

bool in_workspace(const PolarPose& pose) {
    return pose.R() >= kMinReachM && pose.R() <= kMaxReachM &&
           pose.alpha() <= kMaxWorkspacePitchDeg;
}

}  // namespace everkin::kinematics
