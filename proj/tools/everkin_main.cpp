// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "everkin/calibration.hpp"
#include "everkin/config.hpp"
#include "everkin/control.hpp"
#include "everkin/errors.hpp"
#include "everkin/experiments.hpp"
#include "everkin/kernels/batch.hpp"
#include "everkin/kinematics.hpp"
#include "everkin/plant.hpp"
#include "everkin/runlog.hpp"

namespace {

using namespace everkin;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;  // bad arguments, bad config, bad input values
constexpr int kExitIo = 2;     // missing/unreadable/unwritable files

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool no_feedforward = false;
    std::string sag;  // "", "on", "off"
};

harness::Config load_effective_config(const CommonOpts& opts) {
    harness::Config cfg;
    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("EVERKIN_CONFIG")) path = env;
    }
    if (!path.empty()) {
        if (!std::filesystem::exists(path))
            throw Error("config file not found: " + path);
        cfg = harness::load_config(path);
    }
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.no_feedforward) cfg.loop.feedforward = false;
    if (opts.sag == "off") {
        cfg.plant.sag_magnitude = 0.0;
    } else if (opts.sag == "on" && cfg.plant.sag_magnitude == 0.0) {
        cfg.plant.sag_magnitude = plant::PlantConfig{}.sag_magnitude;
    }
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path,
                    "JSON config file (falls back to $EVERKIN_CONFIG)");
    cmd->add_option("--out", opts.out_dir, "output directory")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    cmd->add_flag("--no-feedforward", opts.no_feedforward,
                  "disable the steering feedforward term");
    cmd->add_option("--sag", opts.sag, "force gravity sag on or off")
        ->check(CLI::IsMember({"on", "off"}));
}

void print_settling(const control::SettlingMetrics& m) {
    if (m.settling_time)
        std::cout << "settling_time=" << g(*m.settling_time) << " s\n";
    else
        std::cout << "settling_time=none\n";
    std::cout << "sse_R=" << g(m.sse_R) << " m sse_alpha=" << g(m.sse_alpha)
              << " deg sse_theta=" << g(m.sse_theta) << " deg\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cable-steered everting-arm simulator and analysis harness"};
    app.require_subcommand(1);

    CommonOpts opts;

    // fk
    std::vector<double> fk_phi;
    double cli_k = ModelCoefficient::kDefault;
    auto* fk = app.add_subcommand("fk", "motor angles -> pose angles");
    fk->add_option("--phi", fk_phi, "steering motor angles, deg")
        ->expected(3)
        ->required();
    fk->add_option("--k", cli_k, "model coefficient")->capture_default_str();

    // ik
    double ik_alpha = 0.0, ik_theta = 0.0;
    auto* ik = app.add_subcommand("ik", "pose angles -> motor angles");
    ik->add_option("--alpha", ik_alpha, "pitch, deg")->required();
    ik->add_option("--theta", ik_theta, "rotation, deg")->required();
    ik->add_option("--k", cli_k, "model coefficient")->capture_default_str();

    // workspace
    double ws_r = 0.0, ws_alpha = 0.0, ws_theta = 0.0;
    auto* ws = app.add_subcommand("workspace", "workspace membership of a pose");
    ws->add_option("--R", ws_r, "reach, m")->required();
    ws->add_option("--alpha", ws_alpha, "pitch, deg")->required();
    ws->add_option("--theta", ws_theta, "rotation, deg")->capture_default_str();

    // sim
    std::vector<double> sim_target;
    double sim_duration = 0.0;
    auto* sim = app.add_subcommand("sim", "closed-loop run to a Cartesian target");
    sim->add_option("--target", sim_target, "target point x y z, m")->expected(3);
    sim->add_option("--duration", sim_duration, "override loop duration, s");
    add_common(sim, opts);

    // experiment
    std::string exp_name;
    auto* exp = app.add_subcommand("experiment", "run a canned experiment");
    exp->add_option("name", exp_name, "experiment name")
        ->required()
        ->check(CLI::IsMember(experiments::experiment_names()));
    add_common(exp, opts);

    // calibrate
    std::string cal_path;
    bool cal_write_report = false;
    auto* cal = app.add_subcommand("calibrate", "fit the coefficient from a mocap CSV");
    cal->add_option("csv", cal_path, "mocap log file")->required();
    cal->add_flag("--report", cal_write_report,
                  "also write calibration_report.json to --out");
    add_common(cal, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (fk->parsed()) {
            PoseAngles pose = kinematics::forward_model(
                MotorAngles(fk_phi[0], fk_phi[1], fk_phi[2]),
                ModelCoefficient(cli_k));
            std::cout << "alpha=" << g(pose.alpha) << " theta="
                      << (pose.theta_defined ? g(pose.theta) : "undefined")
                      << "\n";
        } else if (ik->parsed()) {
            MotorAngles phi =
                kinematics::inverse_model(ik_alpha, ik_theta, ModelCoefficient(cli_k));
            std::cout << "phi=" << g(phi.values()[0]) << " " << g(phi.values()[1])
                      << " " << g(phi.values()[2]) << "\n";
        } else if (ws->parsed()) {
            bool in = kinematics::in_workspace(PolarPose(ws_r, ws_alpha, ws_theta));
            std::cout << "in_workspace=" << (in ? "true" : "false") << "\n";
        } else if (sim->parsed()) {
            harness::Config cfg = load_effective_config(opts);
            if (sim_duration > 0.0) cfg.loop.duration = sim_duration;
            CartesianPoint target = cfg.experiment.target;
            if (!sim_target.empty())
                target = {sim_target[0], sim_target[1], sim_target[2]};

            control::Controller ctrl(cfg.gains, ModelCoefficient(cfg.model_k),
                                     cfg.loop.feedforward);
            PolarPose pose = ctrl.set_target(target);
            if (!ctrl.target_in_workspace())
                std::cout << "warning: target outside the workspace envelope\n";

            plant::PlantState s0 =
                plant::make_state(cfg.plant, 0.0, {}, cfg.payload_kg);
            RunLog log = control::run_closed_loop(s0, ctrl, cfg.plant,
                                                  cfg.loop.duration, cfg.loop.dt);
            log.experiment = "sim";
            log.seed = cfg.seed;
            log.config_json = harness::config_snapshot(cfg);

            std::filesystem::create_directories(opts.out_dir);
            auto path = std::filesystem::path(opts.out_dir) / "sim_runlog.csv";
            std::ofstream out(path, std::ios::binary);
            if (!out) throw Error("cannot open output file: " + path.string());
            write_runlog_csv(out, log);

            std::cout << "target pose: R=" << g(pose.R()) << " alpha="
                      << g(pose.alpha()) << " theta=" << g(pose.theta()) << "\n";
            print_settling(control::settling_metrics(log));
            std::cout << "wrote " << path.string() << " (" << log.rows.size()
                      << " rows, kernels: "
                      << kernels::isa_name(kernels::active_isa()) << ")\n";
        } else if (exp->parsed()) {
            harness::Config cfg = load_effective_config(opts);
            for (const std::string& line :
                 experiments::run_experiment(exp_name, cfg, opts.out_dir))
                std::cout << line << "\n";
        } else if (cal->parsed()) {
            std::ifstream in(cal_path, std::ios::binary);
            if (!in) throw Error("cannot open input file: " + cal_path);
            auto samples = calibration::parse_mocap_csv(in);
            auto fit = calibration::estimate_k(samples);
            std::cout << "k_hat=" << g(fit.k_hat) << " r_squared=" << g(fit.r_squared)
                      << " residual_max=" << g(fit.residual_max)
                      << " n=" << fit.n_samples << "\n";

            nlohmann::json report;
            report["pooled"] = {{"k_hat", fit.k_hat},
                                {"r_squared", fit.r_squared},
                                {"residual_max_deg", fit.residual_max},
                                {"n_samples", fit.n_samples}};
            try {
                auto ind = calibration::pressure_length_independence(samples);
                std::cout << "condition spread=" << g(ind.max_pairwise_diff)
                          << (ind.flagged ? " (FLAGGED)" : " (within threshold)")
                          << "\n";
                nlohmann::json groups = nlohmann::json::array();
                for (const auto& grp : ind.groups)
                    groups.push_back({{"pressure_psi", grp.pressure_psi},
                                      {"length_m", grp.arm_length_m},
                                      {"k_hat", grp.fit.k_hat},
                                      {"n_samples", grp.fit.n_samples}});
                report["groups"] = groups;
                report["max_pairwise_diff"] = ind.max_pairwise_diff;
                report["flagged"] = ind.flagged;
            } catch (const InsufficientData&) {
                // single-condition logs fit fine; there is just no spread
            }
            if (cal_write_report) {
                std::filesystem::create_directories(opts.out_dir);
                auto path =
                    std::filesystem::path(opts.out_dir) / "calibration_report.json";
                std::ofstream out(path, std::ios::binary);
                if (!out) throw Error("cannot open output file: " + path.string());
                out << report.dump(2) << '\n';
                std::cout << "wrote " << path.string() << "\n";
            }
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidMotorSet& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const OutOfRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DegenerateInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InsufficientData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const MultiMotorData& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const LengthMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
