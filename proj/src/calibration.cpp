// SPDX-License-Identifier: Apache-2.0

#include "everkin/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "everkin/angles.hpp"
#include "everkin/csv.hpp"
#include "everkin/errors.hpp"
#include "everkin/kinematics.hpp"

namespace everkin::calibration {

std::vector<MocapSample> parse_mocap_csv(std::istream& in) {
    std::vector<MocapSample> samples;
    std::string line;
    int line_no = 0;
    bool saw_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line != kMocapHeader)
                throw SchemaError("unexpected mocap header: " + line);
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;

        auto fields = csv::split_fields(line);
        if (fields.size() != 9)
            throw ParseError(
                "expected 9 fields, got " + std::to_string(fields.size()), line_no);

        double v[9];
        for (int i = 0; i < 9; ++i) v[i] = csv::parse_double(fields[i], line_no);

        MocapSample s;
        s.time_s = v[0];
        s.position = {v[1], v[2], v[3]};
        try {
            s.motors = MotorAngles(v[4], v[5], v[6]);
        } catch (const InvalidMotorSet& e) {
            throw ParseError(e.what(), line_no);
        }
        s.pressure_psi = v[7];
        s.arm_length_m = v[8];
        if (!samples.empty() && !(s.time_s > samples.back().time_s))
            throw ParseError("time must increase monotonically", line_no);
        samples.push_back(s);
    }
    if (!saw_header) throw SchemaError("mocap header not found");
    return samples;
}

void write_mocap_csv(std::ostream& out, std::span<const MocapSample> samples) {
    out << kMocapHeader << '\n';
    for (const MocapSample& s : samples) {
        const double cols[] = {s.time_s,
                               s.position.x,
                               s.position.y,
                               s.position.z,
                               s.motors.values()[0],
                               s.motors.values()[1],
                               s.motors.values()[2],
                               s.pressure_psi,
                               s.arm_length_m};
        for (int i = 0; i < 9; ++i) {
            if (i) out << ',';
            out << csv::format_double(cols[i]);
        }
        out << '\n';
    }
}

FitResult estimate_k(std::span<const MocapSample> samples) {
    std::vector<double> phi, alpha;
    phi.reserve(samples.size());
    alpha.reserve(samples.size());

    for (const MocapSample& s : samples) {
        const auto& p = s.motors.values();
        int engaged = 0;
        double cable = 0.0;
        for (double v : p) {
            if (v > 0.0) {
                ++engaged;
                cable = v;
            }
        }
        if (engaged > 1)
            throw MultiMotorData(
                "coefficient fitting needs single-motor sweeps");
        if (engaged == 0) continue;
        phi.push_back(cable);
        alpha.push_back(kinematics::cartesian_to_polar(s.position).alpha());
    }

    if (phi.size() < 2 ||
        *std::max_element(phi.begin(), phi.end()) ==
            *std::min_element(phi.begin(), phi.end()))
        throw InsufficientData(
            "need at least two samples with distinct cable angles");

    double sum_pa = 0.0, sum_pp = 0.0, sum_aa = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        sum_pa += phi[i] * alpha[i];
        sum_pp += phi[i] * phi[i];
        sum_aa += alpha[i] * alpha[i];
    }

    FitResult fit;
    fit.k_hat = sum_pa / sum_pp;
    fit.n_samples = static_cast<int>(phi.size());

    double ss_res = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        double r = alpha[i] - fit.k_hat * phi[i];
        ss_res += r * r;
        fit.residual_max = std::max(fit.residual_max, std::abs(r));
    }
    fit.r_squared = sum_aa > 0.0 ? 1.0 - ss_res / sum_aa : 1.0;
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    return fit;
}

IndependenceReport pressure_length_independence(
    std::span<const MocapSample> samples, double threshold) {
    if (!(threshold > 0.0) || !std::isfinite(threshold))
        throw OutOfRange("threshold must be > 0");

    std::map<std::pair<double, double>, std::vector<MocapSample>> groups;
    for (const MocapSample& s : samples)
        groups[{s.pressure_psi, s.arm_length_m}].push_back(s);
    if (groups.size() < 2)
        throw InsufficientData(
            "need at least two (pressure, length) conditions");

    IndependenceReport report;
    report.threshold = threshold;
    for (const auto& [key, group] : groups)
        report.groups.push_back({key.first, key.second, estimate_k(group)});

    for (std::size_t i = 0; i < report.groups.size(); ++i)
        for (std::size_t j = i + 1; j < report.groups.size(); ++j)
            report.max_pairwise_diff =
                std::max(report.max_pairwise_diff,
                         std::abs(report.groups[i].fit.k_hat -
                                  report.groups[j].fit.k_hat));
    report.flagged = report.max_pairwise_diff > threshold;
    return report;
}

SweepErrorField sweep_error_field(std::span<const PolarPose> desired,
                                  std::span<const PolarPose> measured) {
    if (desired.size() != measured.size())
        throw LengthMismatch("desired and measured sweeps differ in length");
    if (desired.empty()) throw InsufficientData("empty sweep");

    SweepErrorField field;
    field.e_alpha.reserve(desired.size());
    field.e_theta.reserve(desired.size());
    for (std::size_t i = 0; i < desired.size(); ++i) {
        double ea = measured[i].alpha() - desired[i].alpha();
        double et = wrap_diff(measured[i].theta(), desired[i].theta());
        field.e_alpha.push_back(ea);
        field.e_theta.push_back(et);
        field.summary.mean_e_alpha += ea;
        field.summary.mean_abs_e_alpha += std::abs(ea);
        field.summary.mean_e_theta += et;
        field.summary.mean_abs_e_theta += std::abs(et);
        field.summary.max_abs_e_theta =
            std::max(field.summary.max_abs_e_theta, std::abs(et));
    }
    auto n = static_cast<double>(desired.size());
    field.summary.mean_e_alpha /= n;
    field.summary.mean_abs_e_alpha /= n;
    field.summary.mean_e_theta /= n;
    field.summary.mean_abs_e_theta /= n;
    return field;
}

}  // namespace everkin::calibration
