// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "everkin/types.hpp"

namespace everkin::kinematics {

// Workspace limits of the physical arm.
inline constexpr double kMinReachM = 0.3;
inline constexpr double kMaxReachM = 1.2;
inline constexpr double kMaxWorkspacePitchDeg = 60.0;

// Ceiling of the steering model itself; poses beyond this have no motor
// solution.
inline constexpr double kMaxModelPitchDeg = 90.0;

// Sector containing rotation theta (any finite angle; wrapped internally).
SteeringSector sector_of(double theta_deg);

// Motor angles -> (pitch, rotation). theta_defined is false when all
// motors are slack.
PoseAngles forward_model(const MotorAngles& motors,
                         ModelCoefficient k = ModelCoefficient{});

// (pitch, rotation) -> motor angles engaging the two motors bounding
// theta's sector. alpha must be in [0, kMaxModelPitchDeg] (OutOfRange
// otherwise); alpha == 0 gives all motors slack regardless of theta.
MotorAngles inverse_model(double alpha_deg, double theta_deg,
                          ModelCoefficient k = ModelCoefficient{});

// Pose -> Cartesian point in the base frame: +x along the undeflected
// arm, theta measured from +y toward +z.
CartesianPoint polar_to_cartesian(const PolarPose& pose);

// Inverse of the above. The origin is degenerate (DegenerateInput);
// points behind the base plane give alpha > 90, which is representable
// but outside the steering model.
PolarPose cartesian_to_polar(const CartesianPoint& p);

// True iff the pose is inside the reachable envelope: kMinReachM <= R <=
// kMaxReachM and alpha <= kMaxWorkspacePitchDeg. Boundary poses are in.
bool in_workspace(const PolarPose& pose);

}  // namespace everkin::kinematics
