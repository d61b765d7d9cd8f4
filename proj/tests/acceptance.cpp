// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks for the shipped behavior. Each check prints
// one [PASS]/[FAIL] line and the process exits nonzero if any fail. The
// tolerances are pinned as constants here on purpose: loosening one is a
// behavior change, not a test fix.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "everkin/angles.hpp"
#include "everkin/calibration.hpp"
#include "everkin/config.hpp"
#include "everkin/control.hpp"
#include "everkin/experiments.hpp"
#include "everkin/kernels/batch.hpp"
#include "everkin/kinematics.hpp"
#include "everkin/plant.hpp"
#include "everkin/runlog.hpp"

using namespace everkin;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

// pinned tolerances and budgets
constexpr double kRoundTripTolDeg = 1e-9;
constexpr double kRoundTripBudgetS = 1.0;
constexpr double kCoefficientTol = 0.005;
constexpr double kGroupSpreadTol = 0.005;
constexpr double kRSquaredMin = 0.99;
constexpr double kRecoveryBudgetS = 1.0;
constexpr double kBoundaryProbeDeg = 1e-6;   // half-separation of the probes
constexpr double kContinuityTolDeg = 1e-6;
constexpr double kLengthStepTol = 1e-12;
constexpr double kFfSteadyTolDeg = 1e-6;
constexpr double kFfMotorTolDeg = 1e-6;
constexpr double kFfWindowS = 5.0;
constexpr double kContrastBudgetS = 5.0;
constexpr double kCounterRotationMinDeg = 1.0;
constexpr double kConvergedTolDeg = 2.0;
constexpr int kMembershipSamples = 100000;

std::string g_cli;  // path to the command-line binary, empty if not found

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// 1. Inverse followed by forward reproduces every pose on a dense angle
// grid, fast enough to run inside an interactive loop.
Outcome check_round_trip() {
    std::vector<double> alpha, theta;
    alpha.reserve(181 * 360);
    theta.reserve(181 * 360);
    for (int a = 0; a <= 180; ++a) {
        for (int t = 0; t < 360; ++t) {
            alpha.push_back(0.5 * a);  // [0, 90] in half-degree steps
            theta.push_back(t);
        }
    }
    auto t0 = clock_type::now();
    double err =
        kernels::roundtrip_max_error(alpha, theta, ModelCoefficient::kDefault);
    double secs = seconds_since(t0);

    Outcome o;
    o.pass = err <= kRoundTripTolDeg && secs < kRoundTripBudgetS;
    o.detail = "max error " + fmt(err) + " deg over " +
               std::to_string(alpha.size()) + " poses, " + fmt(secs) + " s, " +
               kernels::isa_name(kernels::active_isa()) + " kernels";
    return o;
}

// 2. The coefficient fit recovers the true value from noisy synthetic
// sweeps, and the per-condition estimates agree.
Outcome check_coefficient_recovery() {
    harness::Config cfg;  // 0.2 deg noise, 200 samples per condition, seed 42
    auto t0 = clock_type::now();
    experiments::EstimateKResult r = experiments::estimate_k_experiment(cfg);
    double secs = seconds_since(t0);

    double true_k = cfg.plant.k_true.value();
    Outcome o;
    o.pass = std::abs(r.pooled.k_hat - true_k) <= kCoefficientTol &&
             r.pooled.r_squared > kRSquaredMin &&
             r.independence.max_pairwise_diff < kGroupSpreadTol &&
             secs < kRecoveryBudgetS;
    o.detail = "k_hat " + fmt(r.pooled.k_hat) + " (true " + fmt(true_k) +
               "), r^2 " + fmt(r.pooled.r_squared) + ", group spread " +
               fmt(r.independence.max_pairwise_diff) + ", " + fmt(secs) + " s";
    return o;
}

// 3. The forward model is continuous where the engaged motor pair changes.
// The two probes straddle a boundary 2*delta apart along the commanded
// sweep, so their rotation outputs legitimately differ by that separation;
// the continuity defect is the excess beyond it.
Outcome check_sector_continuity() {
    const double delta = kBoundaryProbeDeg;
    double worst = 0.0;
    for (double alpha : {10.4, 30.0, 60.0, 90.0}) {
        for (double boundary : {0.0, 120.0, 240.0}) {
            double theta_l = wrap360(boundary - delta);
            double theta_r = wrap360(boundary + delta);
            MotorAngles left = kinematics::inverse_model(alpha, theta_l);
            MotorAngles right = kinematics::inverse_model(alpha, theta_r);
            PoseAngles out_l = kinematics::forward_model(left);
            PoseAngles out_r = kinematics::forward_model(right);

            double d_alpha = std::abs(out_l.alpha - out_r.alpha);
            double d_theta = std::abs(wrap_diff(out_l.theta, out_r.theta));
            double defect = std::max(d_alpha, std::abs(d_theta - 2.0 * delta));
            worst = std::max(worst, defect);
        }
    }
    Outcome o;
    o.pass = worst <= kContinuityTolDeg;
    o.detail = "worst boundary defect " + fmt(worst) + " deg (probes " +
               fmt(2.0 * delta) + " deg apart)";
    return o;
}

// 4. Plant speed/payload anchors hold exactly, and integrating the
// extension for one second reproduces the reference speed.
Outcome check_plant_anchors() {
    plant::PlantConfig cfg;  // 8 psi reference
    bool speed_exact = plant::extension_speed(cfg) == 0.27;

    plant::PlantState s = plant::make_state(cfg);
    for (int i = 0; i < 10; ++i) s = plant::step(s, {1.2, {}}, 0.1, cfg);
    bool step_exact = std::abs(s.length - 0.27) <= kLengthStepTol;

    plant::PlantConfig high = cfg;
    high.pressure_psi = 10.0;
    bool payload_exact = plant::max_payload(high) == 1.4;

    Outcome o;
    o.pass = speed_exact && step_exact && payload_exact;
    o.detail = std::string("speed(8 psi) ") + (speed_exact ? "exact" : "off") +
               ", 1 s length " + fmt(s.length) + ", payload(10 psi) " +
               (payload_exact ? "exact" : "off");
    return o;
}

// 5. With the feedforward bias, exact plant knowledge, no sag and a
// generous slew limit, the steering loop reaches a 1e-6 deg steady state
// within five simulated seconds and the shafts match the inverse map.
// Integral and derivative action are disabled here: an integrator charged
// during the approach discharges with a ~9 s time constant at the default
// gains, which would dominate this window. The default-gain closed-loop
// behavior is covered by the next check.
Outcome check_feedforward_exactness() {
    harness::Config cfg;
    cfg.plant.sag_magnitude = 0.0;
    cfg.plant.steering_rate = 1e9;
    cfg.gains.steering.ki = 0.0;
    cfg.gains.steering.kd = 0.0;

    control::Controller ctrl(cfg.gains, ModelCoefficient(cfg.model_k), true);
    ctrl.set_target_pose(PolarPose(1.0, 30.0, 45.0));
    plant::PlantState s0 = plant::make_state(cfg.plant, 1.0);
    RunLog log =
        control::run_closed_loop(s0, ctrl, cfg.plant, kFfWindowS, cfg.loop.dt);

    const RunLogRow& last = log.rows.back();
    MotorAngles want = kinematics::inverse_model(30.0, 45.0,
                                                 ModelCoefficient(cfg.model_k));
    double motor_err = 0.0;
    for (int i = 0; i < 3; ++i)
        motor_err = std::max(motor_err,
                             std::abs(last.phi[i] - want.values()[i]));

    Outcome o;
    o.pass = std::abs(last.e_alpha) <= kFfSteadyTolDeg &&
             std::abs(last.e_theta) <= kFfSteadyTolDeg &&
             std::abs(last.e_R) <= kFfSteadyTolDeg && motor_err <= kFfMotorTolDeg;
    o.detail = "final |e_alpha| " + fmt(std::abs(last.e_alpha)) +
               ", |e_theta| " + fmt(std::abs(last.e_theta)) +
               ", motor defect " + fmt(motor_err) + " deg";
    return o;
}

// 6. At identical default gains the feedforward run settles faster and
// holds a lower steering error than the pure-feedback run, with and
// without gravity sag.
Outcome check_feedforward_contrast() {
    auto t0 = clock_type::now();
    Outcome o;
    o.pass = true;
    for (double sag : {6.0, 0.0}) {
        harness::Config cfg;
        cfg.plant.sag_magnitude = sag;
        experiments::StepCompareResult r = experiments::step_compare(cfg);

        bool both_settle = r.metrics_ff.settling_time.has_value() &&
                           r.metrics_noff.settling_time.has_value();
        bool faster = both_settle && *r.metrics_ff.settling_time <
                                         *r.metrics_noff.settling_time;
        bool lower_sse =
            r.metrics_ff.sse_steering() < r.metrics_noff.sse_steering();
        o.pass = o.pass && faster && lower_sse;
        o.detail += std::string(sag > 0.0 ? "sag on: " : "sag off: ") +
                    (both_settle
                         ? fmt(*r.metrics_ff.settling_time) + " vs " +
                               fmt(*r.metrics_noff.settling_time) + " s, sse " +
                               fmt(r.metrics_ff.sse_steering()) + " vs " +
                               fmt(r.metrics_noff.sse_steering()) + " deg"
                         : std::string("did not settle")) +
                    (sag > 0.0 ? "; " : "");
    }
    double secs = seconds_since(t0);
    o.pass = o.pass && secs < kContrastBudgetS;
    o.detail += " (" + fmt(secs) + " s)";
    return o;
}

// 7. Under gravity sag, a full rotation sweep at constant commanded pitch
// shows a nonzero mean rotation bias, and the measured rotations leave an
// empty arc of positive width directly below the 360 deg seam.
Outcome check_sag_sweep() {
    harness::Config cfg;  // sag 6 deg toward 270 by default
    cfg.experiment.alpha_levels = {10.4};
    cfg.experiment.theta_step_deg = 1.0;
    experiments::CircleSweepResult r = experiments::circle_sweep(cfg);

    const experiments::SweepLevelReport& level = r.levels.front();
    bool biased = level.errors.mean_abs_e_theta > 1e-6;
    bool dead_arc = level.seam_arc_width > 0.0 && level.seam_arc_start < 360.0;

    Outcome o;
    o.pass = biased && dead_arc;
    o.detail = "mean |e_theta| " + fmt(level.errors.mean_abs_e_theta) +
               " deg, empty arc [" + fmt(level.seam_arc_start) + ", 360) = " +
               fmt(level.seam_arc_width) + " deg wide";
    return o;
}

// 8. Pure feedback targeting a rotation just past the 0/360 seam first
// rotates the wrong way: the engaged motor's command clamps at zero while
// the released shaft unwinds, so the measured rotation dips away from the
// target before the loop converges.
Outcome check_counter_rotation() {
    harness::Config cfg;  // sag on
    control::Controller ctrl(cfg.gains, ModelCoefficient(cfg.model_k), false);
    ctrl.set_target_pose(PolarPose(1.12, 10.4, 5.0));
    plant::PlantState s0 = plant::make_state(
        cfg.plant, 1.12, kinematics::inverse_model(10.4, 0.0));
    RunLog log =
        control::run_closed_loop(s0, ctrl, cfg.plant, 60.0, cfg.loop.dt);

    const RunLogRow& first = log.rows.front();
    if (first.flags & kFlagThetaUndefined)
        return {false, "starting rotation undefined"};
    double theta0 = first.theta_real;
    double commanded = wrap_diff(5.0, theta0);

    double min_disp = 0.0;
    for (const RunLogRow& row : log.rows) {
        if (row.flags & kFlagThetaUndefined) continue;
        min_disp = std::min(min_disp, wrap_diff(row.theta_real, theta0));
    }
    double final_err = std::abs(log.rows.back().e_theta);

    Outcome o;
    o.pass = commanded > 0.0 && min_disp <= -kCounterRotationMinDeg &&
             final_err <= kConvergedTolDeg;
    o.detail = "commanded " + fmt(commanded) + " deg, initial dip " +
               fmt(min_disp) + " deg, final |e_theta| " + fmt(final_err) +
               " deg";
    return o;
}

// 9. Two separate CLI processes with the same config and seed produce
// byte-identical experiment artifacts.
Outcome check_reproducibility() {
    if (g_cli.empty())
        return {false, "command-line binary not found (set EVERKIN_CLI)"};

    fs::path tmp = fs::temp_directory_path() /
                   ("everkin_accept_" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    fs::path cfg_path = tmp / "config.json";
    std::ofstream(cfg_path) << R"({"loop": {"duration": 5.0}})";

    auto run_once = [&](const std::string& out_dir) {
        std::string cmd = "\"" + g_cli + "\" experiment step-compare --config " +
                          cfg_path.string() + " --seed 7 --out " + out_dir +
                          " > /dev/null 2>&1";
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    Outcome o;
    bool ok_a = run_once((tmp / "a").string());
    bool ok_b = run_once((tmp / "b").string());
    if (!ok_a || !ok_b) {
        o.detail = "CLI invocation failed";
    } else {
        o.pass = true;
        for (const char* name : {"step_compare_ff.csv", "step_compare_noff.csv",
                                 "step_compare_summary.json"}) {
            std::string a = slurp(tmp / "a" / name);
            std::string b = slurp(tmp / "b" / name);
            bool same = !a.empty() && a == b;
            o.pass = o.pass && same;
            o.detail += std::string(name) + (same ? " identical; " : " DIFFERS; ");
        }
    }
    std::error_code ec;
    fs::remove_all(tmp, ec);
    return o;
}

// 10. The workspace predicate agrees with a brute-force membership test
// performed on the Cartesian point alone.
Outcome check_workspace_membership() {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> ur(0.0, 1.5);
    std::uniform_real_distribution<double> ua(0.0, 95.0);
    std::uniform_real_distribution<double> ut(0.0, 360.0);

    int mismatches = 0;
    for (int i = 0; i < kMembershipSamples; ++i) {
        PolarPose pose(ur(rng), ua(rng), ut(rng));
        bool lib = kinematics::in_workspace(pose);

        CartesianPoint p = kinematics::polar_to_cartesian(pose);
        double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
        double pitch =
            std::atan2(std::sqrt(p.y * p.y + p.z * p.z), p.x) * 180.0 / M_PI;
        bool brute = r >= 0.3 && r <= 1.2 && pitch <= 60.0;

        if (lib != brute) ++mismatches;
    }
    Outcome o;
    o.pass = mismatches == 0;
    o.detail = std::to_string(mismatches) + " disagreements in " +
               std::to_string(kMembershipSamples) + " random poses";
    return o;
}

}  // namespace

int main(int, char** argv) {
    if (const char* env = std::getenv("EVERKIN_CLI")) {
        g_cli = env;
    } else {
        fs::path guess = fs::absolute(argv[0]).parent_path().parent_path() /
                         "tools" / "everkin";
        if (fs::exists(guess)) g_cli = guess.string();
    }

    struct Criterion {
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {"kinematic round trip over the full angle grid", check_round_trip},
        {"coefficient recovery from noisy synthetic sweeps",
         check_coefficient_recovery},
        {"forward-model continuity across sector boundaries",
         check_sector_continuity},
        {"plant speed and payload anchors", check_plant_anchors},
        {"feedforward reaches a 1e-6 deg steady state in 5 s",
         check_feedforward_exactness},
        {"feedforward beats pure feedback at identical gains",
         check_feedforward_contrast},
        {"gravity sag biases the sweep and opens a dead arc", check_sag_sweep},
        {"seam-adjacent target provokes a counter-rotation",
         check_counter_rotation},
        {"experiment artifacts are byte-reproducible", check_reproducibility},
        {"workspace predicate matches brute-force membership",
         check_workspace_membership},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = clock_type::now();
        try {
            o = criteria[i].fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double secs = seconds_since(t0);
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
                  << criteria[i].name << " -- " << o.detail << " [" << fmt(secs)
                  << " s]\n";
        if (!o.pass) ++failures;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/"
              << criteria.size() << " acceptance checks passed\n";
    return failures == 0 ? 0 : 1;
}
