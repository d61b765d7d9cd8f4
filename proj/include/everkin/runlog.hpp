// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace everkin {

// Bit flags for a run-log row.
enum : unsigned {
    kFlagThetaUndefined = 1u << 0,       // measured rotation undefined (straight arm)
    kFlagCommandClamped = 1u << 1,       // plant clamped part of the command
    kFlagTargetOutOfWorkspace = 1u << 2, // controller target outside the envelope
    kFlagBuckled = 1u << 3,              // payload over capacity, extension blocked
};

struct RunLogRow {
    double time_s = 0.0;
    double R_des = 0.0, alpha_des = 0.0, theta_des = 0.0;
    double R_real = 0.0, alpha_real = 0.0, theta_real = 0.0;
    double mu_R = 0.0;
    std::array<double, 3> mu_phi{};
    std::array<double, 3> phi{};
    double e_R = 0.0, e_alpha = 0.0, e_theta = 0.0;
    unsigned flags = 0;
};

// One closed-loop run: per-tick rows plus the metadata that makes the file
// reproducible on its own.
struct RunLog {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string config_json;  // one-line JSON snapshot; may be empty
    std::vector<RunLogRow> rows;
};

inline constexpr const char* kRunLogHeader =
    "time_s,R_des_m,alpha_des_deg,theta_des_deg,R_real_m,alpha_real_deg,"
    "theta_real_deg,mu_R_m,mu_phi1_deg,mu_phi2_deg,mu_phi3_deg,phi1_deg,"
    "phi2_deg,phi3_deg,e_R_m,e_alpha_deg,e_theta_deg,flags";

// CSV with `# key: value` metadata comment lines before the header. Doubles
// are written shortest-round-trip, so write -> parse -> write is
// byte-identical.
void write_runlog_csv(std::ostream& out, const RunLog& log);
RunLog parse_runlog_csv(std::istream& in);

}  // namespace everkin
