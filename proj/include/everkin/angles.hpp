// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <numbers>

namespace everkin {

inline constexpr double kDegPerRad = 180.0 / std::numbers::pi;
inline constexpr double kRadPerDeg = std::numbers::pi / 180.0;

// Wraps a finite angle into [0, 360). Never returns -0.0 or 360.0.
inline double wrap360(double deg) {
    double w = deg - 360.0 * std::floor(deg / 360.0);
    if (w >= 360.0) w -= 360.0;  // floor rounding can land exactly on 360
    if (w == 0.0) w = 0.0;       // normalize -0.0
    return w;
}

// Smallest signed difference a - b, in (-180, 180].
inline double wrap_diff(double a_deg, double b_deg) {
    double d = wrap360(a_deg - b_deg);
    return d > 180.0 ? d - 360.0 : d;
}

// sin/cos in degrees with exact values at multiples of 90. Quadrant
// reduction keeps |r| <= 45 so cancellation near the axes cannot occur,
// and zeros come out as +0.0.
inline void sincosd(double deg, double& s, double& c) {
    double q = std::round(deg / 90.0);
    double r = (deg - 90.0 * q) * kRadPerDeg;
    double sr = std::sin(r);
    double cr = std::cos(r);
    switch (static_cast<int>(static_cast<long long>(q) & 3LL)) {
        case 0: s = sr;  c = cr;  break;
        case 1: s = cr;  c = -sr; break;
        case 2: s = -sr; c = -cr; break;
        default: s = -cr; c = sr; break;
    }
    if (s == 0.0) s = 0.0;
    if (c == 0.0) c = 0.0;
}

inline double sind(double deg) {
    double s, c;
    sincosd(deg, s, c);
    return s;
}

inline double cosd(double deg) {
    double s, c;
    sincosd(deg, s, c);
    return c;
}

inline double atan2d(double y, double x) {
    return std::atan2(y, x) * kDegPerRad;
}

}  // namespace everkin
