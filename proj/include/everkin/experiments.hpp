// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "everkin/calibration.hpp"
#include "everkin/config.hpp"
#include "everkin/control.hpp"
#include "everkin/runlog.hpp"

namespace everkin::experiments {

// Closed-loop step to experiment.target, once with feedforward and once
// without, identical gains and plant both times.
struct StepCompareResult {
    RunLog with_ff;
    RunLog without_ff;
    control::SettlingMetrics metrics_ff{};
    control::SettlingMetrics metrics_noff{};
};

StepCompareResult step_compare(const harness::Config& cfg);

// Open-loop rotation sweep at constant commanded pitch: for each level,
// the plant is driven around the full circle and each commanded rotation
// is held until the shafts arrive exactly. The report covers the
// desired-vs-measured error field plus which rotation arcs the measured
// samples never landed in (`seam_*` is the empty arc ending at 360,
// `widest_*` the largest empty arc anywhere; both are sample-coverage
// statements at this sweep's resolution, not continuum claims).
struct SweepLevelReport {
    double alpha_level = 0.0;
    int sample_count = 0;
    double mean_measured_alpha = 0.0;
    calibration::SweepSummary errors{};
    double seam_arc_start = 0.0;
    double seam_arc_width = 0.0;
    double widest_arc_start = 0.0;
    double widest_arc_width = 0.0;
};

struct CircleSweepResult {
    RunLog log;  // one row per (level, commanded rotation)
    std::vector<SweepLevelReport> levels;
};

CircleSweepResult circle_sweep(const harness::Config& cfg);

// Synthetic single-motor calibration sweeps across the configured
// (pressure, length) conditions, with Gaussian pitch noise, then the
// coefficient fit pooled and per condition.
struct EstimateKResult {
    std::vector<calibration::MocapSample> samples;
    calibration::FitResult pooled{};
    calibration::IndependenceReport independence{};
};

EstimateKResult estimate_k_experiment(const harness::Config& cfg);

// Workspace/reachability grid. `in_workspace` is the reach envelope;
// `reachable` asks whether any steering solution can hold the pose's
// pitch/rotation once gravity sag is added (the required deflection must
// stay inside the 90 deg model ceiling).
struct WorkspaceCell {
    PolarPose pose{0.0, 0.0, 0.0};
    CartesianPoint point{};
    bool in_workspace = false;
    bool reachable = false;
};

struct WorkspaceMapResult {
    std::vector<WorkspaceCell> cells;
    int in_workspace_count = 0;
    int reachable_count = 0;
};

WorkspaceMapResult workspace_map(const harness::Config& cfg);

inline constexpr const char* kWorkspaceMapHeader =
    "R_m,alpha_deg,theta_deg,x_m,y_m,z_m,in_workspace,reachable";

// Known experiment names, in CLI order.
std::vector<std::string> experiment_names();

// Runs one experiment by name, writes its artifacts under out_dir
// (created if needed), and returns printable summary lines. Unknown names
// throw OutOfRange; file-system failures throw Error.
std::vector<std::string> run_experiment(const std::string& name,
                                        const harness::Config& cfg,
                                        const std::filesystem::path& out_dir);

}  // namespace everkin::experiments
