// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "everkin/angles.hpp"
#include "everkin/errors.hpp"

namespace everkin {

// Steering shaft angles in degrees, motors 1..3 mounted at bearings
// 0/120/240. Physical cables can only pull, and pulling more than two at
// once fights itself, so the set is valid only if every angle is >= 0 and
// at most two are nonzero (adjacency of the nonzero pair is a consequence
// of which sector is driven, not a separate constraint here).
class MotorAngles {
public:
    MotorAngles() : phi_{0.0, 0.0, 0.0} {}

    MotorAngles(double phi1, double phi2, double phi3) : phi_{phi1, phi2, phi3} {
        int nonzero = 0;
        for (double p : phi_) {
            if (std::isnan(p) || p < 0.0)
                throw InvalidMotorSet("motor angles must be finite and >= 0");
            if (p > 0.0) ++nonzero;
        }
        if (nonzero > 2)
            throw InvalidMotorSet("at most two motors may be engaged at once");
    }

    // 1-based, matching the motor numbering on the hardware.
    double phi(int i) const { return phi_.at(static_cast<size_t>(i - 1)); }
    const std::array<double, 3>& values() const { return phi_; }

    bool all_zero() const { return phi_[0] == 0.0 && phi_[1] == 0.0 && phi_[2] == 0.0; }

    bool operator==(const MotorAngles&) const = default;

private:
    std::array<double, 3> phi_;
};

// Tip pose in the spherical base frame: reach R (m), pitch alpha away from
// the straight-arm axis (deg), rotation theta about that axis (deg,
// measured from motor 1's bearing toward motor 2's). theta is stored
// wrapped to [0, 360). alpha up to 180 is representable so that any
// Cartesian point except the origin has a pose; the steering model itself
// only produces alpha <= 90.
class PolarPose {
public:
    PolarPose(double r, double alpha_deg, double theta_deg)
        : r_(r), alpha_(alpha_deg), theta_(wrap360(theta_deg)) {
        if (!(r_ >= 0.0) || !std::isfinite(r_))
            throw OutOfRange("pose reach must be finite and >= 0");
        if (!(alpha_ >= 0.0 && alpha_ <= 180.0))
            throw OutOfRange("pose pitch must be in [0, 180] deg");
        if (!std::isfinite(theta_))
            throw OutOfRange("pose rotation must be finite");
    }

    double R() const { return r_; }
    double alpha() const { return alpha_; }
    double theta() const { return theta_; }

    bool operator==(const PolarPose&) const = default;

private:
    double r_;
    double alpha_;
    double theta_;
};

struct CartesianPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const CartesianPoint&) const = default;
};

// Pitch/rotation pair as produced by the forward model. theta_defined is
// false on the straight-arm axis, where rotation has no meaning; theta is
// 0 there by convention.
struct PoseAngles {
    double alpha = 0.0;
    double theta = 0.0;
    bool theta_defined = false;
};

// Linear cable-to-pitch coefficient: alpha = k * (effective cable angle).
class ModelCoefficient {
public:
    static constexpr double kDefault = 0.104;

    explicit ModelCoefficient(double k = kDefault) : k_(k) {
        if (!(k_ > 0.0) || !std::isfinite(k_))
            throw OutOfRange("model coefficient must be finite and > 0");
    }

    double value() const { return k_; }

private:
    double k_;
};

enum class SectorId { S1 = 0, S2 = 1, S3 = 2 };

// One 120-degree steering sector: rotation range [theta_start,
// theta_start + 120), driven by the two bounding motors. `lead` is the
// motor at theta_start, `trail` the one at theta_start + 120, `idle` the
// third.
struct SteeringSector {
    SectorId id;
    double theta_start;
    int lead;
    int trail;
    int idle;
};

}  // namespace everkin
