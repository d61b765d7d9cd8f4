// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "everkin/types.hpp"

namespace everkin::calibration {

// One row of a tracking-system log used for coefficient fitting: tip
// position plus the actuation and condition it was recorded under.
struct MocapSample {
    double time_s = 0.0;
    CartesianPoint position{};
    MotorAngles motors{};
    double pressure_psi = 0.0;
    double arm_length_m = 0.0;
};

inline constexpr const char* kMocapHeader =
    "time_s,x_m,y_m,z_m,phi1_deg,phi2_deg,phi3_deg,pressure_psi,length_m";

// Strict reader: the header must match kMocapHeader exactly (SchemaError),
// every value must be finite and time strictly increasing (ParseError with
// a 1-based line number), and motor sets must satisfy the two-motor rule.
std::vector<MocapSample> parse_mocap_csv(std::istream& in);

// Writer producing LF-terminated lines with shortest-round-trip doubles;
// parse -> write reproduces the input byte for byte.
void write_mocap_csv(std::ostream& out, std::span<const MocapSample> samples);

// Least-squares fit of the cable-to-pitch coefficient through the origin:
// k_hat = sum(phi*alpha) / sum(phi^2) over single-motor samples, with the
// pitch recovered from the Cartesian position. r_squared is the uncentered
// coefficient (1 - SS_res / sum(alpha^2), clamped to [0, 1]); exactly 1 on
// noiseless data. Samples with all motors slack carry no information for a
// through-origin fit and are skipped; n_samples counts the used ones.
// Throws MultiMotorData if any sample engages two motors, and
// InsufficientData when fewer than two distinct cable angles remain.
struct FitResult {
    double k_hat = 0.0;
    double r_squared = 0.0;
    double residual_max = 0.0;  // max |alpha - k_hat*phi|, degrees
    int n_samples = 0;
};

FitResult estimate_k(std::span<const MocapSample> samples);

// Fits k per (pressure, length) condition and reports the spread. The
// coefficient is supposed to be a pure cable-path property; a spread above
// the threshold flags that the rig (or the model) leaks pressure/length
// into it.
struct ConditionFit {
    double pressure_psi = 0.0;
    double arm_length_m = 0.0;
    FitResult fit{};
};

struct IndependenceReport {
    std::vector<ConditionFit> groups;  // sorted by (pressure, length)
    double max_pairwise_diff = 0.0;
    double threshold = 0.0;
    bool flagged = false;
};

IndependenceReport pressure_length_independence(std::span<const MocapSample> samples,
                                                double threshold = 0.01);

// Pointwise desired-vs-measured error field of a sweep. Rotation errors
// use the shortest wrapped difference. The signed rotation mean of a
// symmetric sweep cancels by construction, so the magnitude mean is the
// headline bias figure.
struct SweepSummary {
    double mean_e_alpha = 0.0;
    double mean_abs_e_alpha = 0.0;
    double mean_e_theta = 0.0;
    double mean_abs_e_theta = 0.0;
    double max_abs_e_theta = 0.0;
};

struct SweepErrorField {
    std::vector<double> e_alpha;
    std::vector<double> e_theta;
    SweepSummary summary{};
};

SweepErrorField sweep_error_field(std::span<const PolarPose> desired,
                                  std::span<const PolarPose> measured);

}  // namespace everkin::calibration
