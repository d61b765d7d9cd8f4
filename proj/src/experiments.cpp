// SPDX-License-Identifier: Apache-2.0

#include "everkin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "everkin/angles.hpp"
#include "everkin/csv.hpp"
#include "everkin/errors.hpp"
#include "everkin/kernels/batch.hpp"
#include "everkin/kinematics.hpp"
#include "everkin/plant.hpp"

namespace everkin::experiments {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);  // keep LF endings everywhere
    if (!out) throw Error("cannot open output file: " + path.string());
    return out;
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

StepCompareResult step_compare(const harness::Config& cfg) {
    cfg.validate();
    std::string snapshot = harness::config_snapshot(cfg);

    auto run_one = [&](bool feedforward) {
        control::Controller ctrl(cfg.gains, ModelCoefficient(cfg.model_k),
                                 feedforward);
        ctrl.set_target(cfg.experiment.target);
        plant::PlantState s0 =
            plant::make_state(cfg.plant, 0.0, {}, cfg.payload_kg);
        RunLog log = control::run_closed_loop(s0, ctrl, cfg.plant,
                                              cfg.loop.duration, cfg.loop.dt);
        log.experiment = feedforward ? "step-compare/ff" : "step-compare/noff";
        log.seed = cfg.seed;
        log.config_json = snapshot;
        return log;
    };

    StepCompareResult r;
    r.with_ff = run_one(true);
    r.without_ff = run_one(false);
    r.metrics_ff = control::settling_metrics(r.with_ff);
    r.metrics_noff = control::settling_metrics(r.without_ff);
    return r;
}

CircleSweepResult circle_sweep(const harness::Config& cfg) {
    cfg.validate();
    const auto& exp = cfg.experiment;

    int per_level = static_cast<int>(std::floor(360.0 / exp.theta_step_deg));
    std::vector<double> theta_cmd(static_cast<std::size_t>(per_level));
    for (int i = 0; i < per_level; ++i)
        theta_cmd[static_cast<std::size_t>(i)] = exp.theta_step_deg * i;

    CircleSweepResult result;
    result.log.experiment = "circle-sweep";
    result.log.seed = cfg.seed;
    result.log.config_json = harness::config_snapshot(cfg);

    std::vector<double> p1(theta_cmd.size()), p2(theta_cmd.size()),
        p3(theta_cmd.size());

    for (double level : exp.alpha_levels) {
        // motor schedule for the whole circle at this pitch, in one batch
        std::vector<double> alphas(theta_cmd.size(), level);
        kernels::inverse_batch(alphas, theta_cmd, cfg.model_k, p1, p2, p3);

        // time keeps running across levels so the log stays monotonic
        double t0 = result.log.rows.empty()
                        ? 0.0
                        : result.log.rows.back().time_s + cfg.loop.dt;
        plant::PlantState s = plant::make_state(
            cfg.plant, exp.arm_length_m,
            kinematics::inverse_model(level, 0.0, ModelCoefficient(cfg.model_k)),
            cfg.payload_kg, t0);

        std::vector<PolarPose> desired, measured;
        desired.reserve(theta_cmd.size());
        measured.reserve(theta_cmd.size());

        for (std::size_t i = 0; i < theta_cmd.size(); ++i) {
            plant::MotorCommand cmd{exp.arm_length_m,
                                    MotorAngles(p1[i], p2[i], p3[i])};
            // hold the command until the shafts arrive exactly; the slew
            // limit guarantees termination
            for (int guard = 0; guard < 1000000; ++guard) {
                if (s.motors == cmd.mu_phi && s.length == cmd.mu_R) break;
                s = plant::step(s, cmd, cfg.loop.dt, cfg.plant);
            }

            PolarPose want(exp.arm_length_m, level, theta_cmd[i]);
            desired.push_back(want);
            measured.push_back(s.measured);

            RunLogRow row;
            row.time_s = s.time_s;
            row.R_des = want.R();
            row.alpha_des = want.alpha();
            row.theta_des = want.theta();
            row.R_real = s.measured.R();
            row.alpha_real = s.measured.alpha();
            row.theta_real = s.measured.theta();
            row.mu_R = cmd.mu_R;
            row.mu_phi = cmd.mu_phi.values();
            row.phi = s.motors.values();
            row.e_R = want.R() - s.measured.R();
            row.e_alpha = want.alpha() - s.measured.alpha();
            row.e_theta = s.theta_defined
                              ? wrap_diff(want.theta(), s.measured.theta())
                              : 0.0;
            row.flags = (s.theta_defined ? 0u : kFlagThetaUndefined) |
                        (s.command_clamped ? kFlagCommandClamped : 0u);
            result.log.rows.push_back(row);
        }

        SweepLevelReport report;
        report.alpha_level = level;
        report.sample_count = static_cast<int>(measured.size());
        for (const PolarPose& m : measured)
            report.mean_measured_alpha += m.alpha();
        report.mean_measured_alpha /= static_cast<double>(measured.size());
        report.errors =
            calibration::sweep_error_field(desired, measured).summary;

        // coverage gaps of the measured rotations
        std::vector<double> thetas;
        for (std::size_t i = 0; i < measured.size(); ++i)
            if (measured[i].alpha() > 0.0) thetas.push_back(measured[i].theta());
        std::sort(thetas.begin(), thetas.end());
        if (!thetas.empty()) {
            report.seam_arc_start = thetas.back();
            report.seam_arc_width = 360.0 - thetas.back();
            double widest = thetas.front() + (360.0 - thetas.back());  // wrap gap
            double widest_start = thetas.back();
            for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
                double gap = thetas[i + 1] - thetas[i];
                if (gap > widest) {
                    widest = gap;
                    widest_start = thetas[i];
                }
            }
            report.widest_arc_start = widest_start;
            report.widest_arc_width = widest;
        }
        result.levels.push_back(report);
    }
    return result;
}

EstimateKResult estimate_k_experiment(const harness::Config& cfg) {
    cfg.validate();
    const auto& exp = cfg.experiment;

    EstimateKResult r;
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> noise(0.0, exp.noise_sigma_deg);

    double t = 0.0;
    const double dt = 1.0 / 120.0;  // tracking-system frame period
    const int n = exp.samples_per_condition;
    for (double pressure : exp.pressures_psi) {
        for (double length : exp.lengths_m) {
            for (int i = 0; i < n; ++i) {
                double phi = exp.phi_min_deg + (exp.phi_max_deg - exp.phi_min_deg) *
                                                   (static_cast<double>(i) / (n - 1));
                double alpha = cfg.plant.k_true.value() * phi;
                if (exp.noise_sigma_deg > 0.0) alpha += noise(rng);
                calibration::MocapSample s;
                s.time_s = t;
                s.position =
                    kinematics::polar_to_cartesian(PolarPose(length, alpha, 0.0));
                s.motors = MotorAngles(phi, 0.0, 0.0);
                s.pressure_psi = pressure;
                s.arm_length_m = length;
                r.samples.push_back(s);
                t += dt;
            }
        }
    }

    r.pooled = calibration::estimate_k(r.samples);
    r.independence = calibration::pressure_length_independence(r.samples);
    return r;
}

WorkspaceMapResult workspace_map(const harness::Config& cfg) {
    cfg.validate();
    const auto& g = cfg.experiment.grid;

    auto grid_value = [](double lo, double hi, int steps, int i) {
        return lo + (hi - lo) * (static_cast<double>(i) / steps);
    };

    double sag_y = cfg.plant.sag_magnitude * cosd(cfg.plant.sag_direction);
    double sag_z = cfg.plant.sag_magnitude * sind(cfg.plant.sag_direction);

    WorkspaceMapResult r;
    r.cells.reserve(static_cast<std::size_t>((g.r_steps + 1) *
                                             (g.alpha_steps + 1) * g.theta_steps));
    for (int ri = 0; ri <= g.r_steps; ++ri) {
        for (int ai = 0; ai <= g.alpha_steps; ++ai) {
            for (int ti = 0; ti < g.theta_steps; ++ti) {
                double R = grid_value(g.r_min, g.r_max, g.r_steps, ri);
                double alpha = grid_value(g.alpha_min, g.alpha_max, g.alpha_steps, ai);
                double theta = 360.0 * (static_cast<double>(ti) / g.theta_steps);

                WorkspaceCell cell;
                cell.pose = PolarPose(R, alpha, theta);
                cell.point = kinematics::polar_to_cartesian(cell.pose);
                cell.in_workspace = kinematics::in_workspace(cell.pose);

                // steering must supply the target deflection minus sag
                double vy = alpha * cosd(theta) - sag_y;
                double vz = alpha * sind(theta) - sag_z;
                cell.reachable =
                    std::hypot(vy, vz) <= kinematics::kMaxModelPitchDeg;

                r.cells.push_back(cell);
                if (cell.in_workspace) ++r.in_workspace_count;
                if (cell.reachable) ++r.reachable_count;
            }
        }
    }
    return r;
}

std::vector<std::string> experiment_names() {
    return {"step-compare", "circle-sweep", "estimate-k", "workspace-map"};
}

namespace {

nlohmann::json metrics_json(const control::SettlingMetrics& m) {
    nlohmann::json j;
    if (m.settling_time)
        j["settling_time_s"] = *m.settling_time;
    else
        j["settling_time_s"] = nullptr;
    j["sse_R_m"] = m.sse_R;
    j["sse_alpha_deg"] = m.sse_alpha;
    j["sse_theta_deg"] = m.sse_theta;
    j["sse_steering_deg"] = m.sse_steering();
    return j;
}

std::vector<std::string> run_step_compare(const harness::Config& cfg,
                                          const fs::path& out_dir) {
    StepCompareResult r = step_compare(cfg);
    {
        auto out = open_out(out_dir / "step_compare_ff.csv");
        write_runlog_csv(out, r.with_ff);
    }
    {
        auto out = open_out(out_dir / "step_compare_noff.csv");
        write_runlog_csv(out, r.without_ff);
    }
    nlohmann::json j;
    j["with_ff"] = metrics_json(r.metrics_ff);
    j["without_ff"] = metrics_json(r.metrics_noff);
    bool ff_settles_faster = r.metrics_ff.settling_time &&
                             (!r.metrics_noff.settling_time ||
                              *r.metrics_ff.settling_time <
                                  *r.metrics_noff.settling_time);
    j["ff_settles_faster"] = ff_settles_faster;
    j["ff_lower_steering_sse"] =
        r.metrics_ff.sse_steering() < r.metrics_noff.sse_steering();
    write_json_file(out_dir / "step_compare_summary.json", j);

    auto fmt_settling = [](const control::SettlingMetrics& m) {
        return m.settling_time ? fmt(*m.settling_time) + " s"
                               : std::string("not settled");
    };
    return {
        "step-compare: ff settling " + fmt_settling(r.metrics_ff) +
            ", steering sse " + fmt(r.metrics_ff.sse_steering()) + " deg",
        "step-compare: noff settling " + fmt_settling(r.metrics_noff) +
            ", steering sse " + fmt(r.metrics_noff.sse_steering()) + " deg",
    };
}

std::vector<std::string> run_circle_sweep(const harness::Config& cfg,
                                          const fs::path& out_dir) {
    CircleSweepResult r = circle_sweep(cfg);
    {
        auto out = open_out(out_dir / "circle_sweep.csv");
        write_runlog_csv(out, r.log);
    }
    nlohmann::json levels = nlohmann::json::array();
    std::vector<std::string> lines;
    for (const SweepLevelReport& rep : r.levels) {
        nlohmann::json j;
        j["alpha_level_deg"] = rep.alpha_level;
        j["sample_count"] = rep.sample_count;
        j["mean_measured_alpha_deg"] = rep.mean_measured_alpha;
        j["mean_e_alpha_deg"] = rep.errors.mean_e_alpha;
        j["mean_abs_e_alpha_deg"] = rep.errors.mean_abs_e_alpha;
        j["mean_e_theta_deg"] = rep.errors.mean_e_theta;
        j["mean_abs_e_theta_deg"] = rep.errors.mean_abs_e_theta;
        j["max_abs_e_theta_deg"] = rep.errors.max_abs_e_theta;
        j["seam_arc_start_deg"] = rep.seam_arc_start;
        j["seam_arc_width_deg"] = rep.seam_arc_width;
        j["widest_arc_start_deg"] = rep.widest_arc_start;
        j["widest_arc_width_deg"] = rep.widest_arc_width;
        levels.push_back(j);
        lines.push_back("circle-sweep: level " + fmt(rep.alpha_level) +
                        " deg, mean |e_theta| " + fmt(rep.errors.mean_abs_e_theta) +
                        " deg, empty arc below 360: " + fmt(rep.seam_arc_width) +
                        " deg");
    }
    nlohmann::json j;
    j["levels"] = levels;
    write_json_file(out_dir / "circle_sweep_report.json", j);
    return lines;
}

std::vector<std::string> run_estimate_k(const harness::Config& cfg,
                                        const fs::path& out_dir) {
    EstimateKResult r = estimate_k_experiment(cfg);
    {
        auto out = open_out(out_dir / "estimate_k_samples.csv");
        calibration::write_mocap_csv(out, r.samples);
    }
    nlohmann::json j;
    j["pooled"] = {{"k_hat", r.pooled.k_hat},
                   {"r_squared", r.pooled.r_squared},
                   {"residual_max_deg", r.pooled.residual_max},
                   {"n_samples", r.pooled.n_samples}};
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : r.independence.groups)
        groups.push_back({{"pressure_psi", g.pressure_psi},
                          {"length_m", g.arm_length_m},
                          {"k_hat", g.fit.k_hat},
                          {"r_squared", g.fit.r_squared},
                          {"n_samples", g.fit.n_samples}});
    j["groups"] = groups;
    j["max_pairwise_diff"] = r.independence.max_pairwise_diff;
    j["threshold"] = r.independence.threshold;
    j["flagged"] = r.independence.flagged;
    write_json_file(out_dir / "estimate_k_report.json", j);
    return {
        "estimate-k: pooled k_hat " + fmt(r.pooled.k_hat) + " (r^2 " +
            fmt(r.pooled.r_squared) + ", " + std::to_string(r.pooled.n_samples) +
            " samples)",
        "estimate-k: max group spread " + fmt(r.independence.max_pairwise_diff) +
            (r.independence.flagged ? " (FLAGGED)" : " (within threshold)"),
    };
}

std::vector<std::string> run_workspace_map(const harness::Config& cfg,
                                           const fs::path& out_dir) {
    WorkspaceMapResult r = workspace_map(cfg);
    auto out = open_out(out_dir / "workspace_map.csv");
    out << kWorkspaceMapHeader << '\n';
    for (const WorkspaceCell& c : r.cells) {
        out << fmt(c.pose.R()) << ',' << fmt(c.pose.alpha()) << ','
            << fmt(c.pose.theta()) << ',' << fmt(c.point.x) << ','
            << fmt(c.point.y) << ',' << fmt(c.point.z) << ','
            << (c.in_workspace ? '1' : '0') << ',' << (c.reachable ? '1' : '0')
            << '\n';
    }
    return {"workspace-map: " + std::to_string(r.cells.size()) + " cells, " +
            std::to_string(r.in_workspace_count) + " in workspace, " +
            std::to_string(r.reachable_count) + " reachable"};
}

}  // namespace

std::vector<std::string> run_experiment(const std::string& name,
                                        const harness::Config& cfg,
                                        const fs::path& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory: " + out_dir.string());

    if (name == "step-compare") return run_step_compare(cfg, out_dir);
    if (name == "circle-sweep") return run_circle_sweep(cfg, out_dir);
    if (name == "estimate-k") return run_estimate_k(cfg, out_dir);
    if (name == "workspace-map") return run_workspace_map(cfg, out_dir);
    throw OutOfRange("unknown experiment: " + name);
}

}  // namespace everkin::experiments
