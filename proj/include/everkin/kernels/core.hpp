// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

// Branchless scalar core of the forward/inverse steering maps. The batch
// kernels (scalar and AVX2) and the single-point API all evaluate exactly
// these expressions, in exactly this operation order; the AVX2 variant
// mirrors them with correctly-rounded vector ops, which is what makes
// bitwise scalar/SIMD agreement a testable property rather than a hope.
// Keep the association parentheses as written.

namespace everkin::kernels {

// Quadratic form of the two-motor pitch law, generalized so that any valid
// motor set (at most two nonzero) reduces to the engaged pair's form:
//   pair (1,2): p1^2 - p1 p2 + p2^2
//   pair (2,3): p2^2 - p2 p3 + p3^2
//   pair (3,1): p3^2 - p3 p1 + p1^2
// Terms touching the idle motor are exact IEEE zeros, so the reduction is
// bitwise, not just algebraic.
inline double forward_q(double p1, double p2, double p3) {
    return ((p1 * p1 - p1 * p2) + p2 * p2) + p3 * ((p3 - p2) - p1);
}

// Arc-fraction rotation law, generalized the same way. Motor 1 sits at
// bearing 0 when paired with motor 2 and at bearing 360 when paired with
// motor 3; w1 selects between the two. Result is in [0, 360] before the
// wrap guard; NaN when all motors are zero (caller decides the convention
// there).
inline double forward_theta_raw(double p1, double p2, double p3) {
    double w1 = p3 > 0.0 ? 360.0 : 0.0;
    double num = (w1 * p1 + 120.0 * p2) + 240.0 * p3;
    double den = (p1 + p2) + p3;
    double th = num / den;
    return th >= 360.0 ? th - 360.0 : th;
}

// Inverse of the two maps above for alpha >= 0 and theta in [0, 360).
// Sector s = floor(theta/120) is bounded by motors (lead, trail) =
// s0:(1,2) s1:(2,3) s2:(3,1); the lead motor takes (1-t) of the scale and
// the trail motor t, where t is the fractional position inside the sector.
// The discriminant 1 - 3t + 3t^2 is >= 1/4 on [0,1], so no domain checks
// are needed beyond the caller's.
inline void inverse_point(double alpha, double theta, double k,
                          double& p1, double& p2, double& p3) {
    double s = std::floor(theta / 120.0);
    double t = (theta - 120.0 * s) / 120.0;
    double scale = alpha / (k * std::sqrt((1.0 - 3.0 * t) + (3.0 * t) * t));
    double lead = (1.0 - t) * scale;
    double trail = t * scale;
    p1 = s == 0.0 ? lead : (s == 2.0 ? trail : 0.0);
    p2 = s == 1.0 ? lead : (s == 0.0 ? trail : 0.0);
    p3 = s == 2.0 ? lead : (s == 1.0 ? trail : 0.0);
}

}  // namespace everkin::kernels
