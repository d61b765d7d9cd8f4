// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "everkin/config.hpp"
#include "everkin/errors.hpp"
#include "everkin/experiments.hpp"
#include "everkin/runlog.hpp"

using namespace everkin;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("everkin_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct CliResult {
    int code = -1;
    std::string out;
};

// Runs the installed binary through the shell; stderr folds into stdout.
CliResult run_cli(const std::string& args) {
    const char* cli = std::getenv("EVERKIN_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = "\"" + std::string(cli) + "\" " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[512];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        r.out.append(buf, n);
    int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

CliResult run_cli_env(const std::string& env_prefix, const std::string& args) {
    const char* cli = std::getenv("EVERKIN_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = env_prefix + " \"" + std::string(cli) + "\" " + args + " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[512];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
        r.out.append(buf, n);
    int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

bool cli_available() { return std::getenv("EVERKIN_CLI") != nullptr; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

harness::Config small_config() {
    harness::Config cfg;
    cfg.loop.duration = 0.5;
    cfg.experiment.alpha_levels = {10.4};
    cfg.experiment.theta_step_deg = 30.0;
    cfg.experiment.samples_per_condition = 20;
    cfg.experiment.pressures_psi = {3.0, 9.0};
    cfg.experiment.lengths_m = {0.6};
    cfg.experiment.grid.r_steps = 2;
    cfg.experiment.grid.alpha_steps = 2;
    cfg.experiment.grid.theta_steps = 4;
    return cfg;
}

}  // namespace

TEST_CASE("an empty json document binds to the built-in defaults") {
    harness::Config from_empty = harness::config_from_json(nlohmann::json::object());
    harness::Config defaults;
    CHECK(harness::config_snapshot(from_empty) == harness::config_snapshot(defaults));
    CHECK(from_empty.plant.payload_per_psi == defaults.plant.payload_per_psi);
    CHECK(from_empty.loop.dt == defaults.loop.dt);
    CHECK(from_empty.seed == 42);
}

TEST_CASE("config serialization round trips") {
    harness::Config cfg = small_config();
    cfg.seed = 1234;
    cfg.gains.steering.kp = 0.5;
    cfg.plant.pressure_psi = 6.5;
    harness::Config back = harness::config_from_json(harness::config_to_json(cfg));
    CHECK(harness::config_snapshot(back) == harness::config_snapshot(cfg));
    // snapshots of equal configs are byte-identical
    CHECK(harness::config_snapshot(cfg) == harness::config_snapshot(cfg));
}

TEST_CASE("config binding reports the offending key path") {
    auto path_of = [](const nlohmann::json& j) {
        try {
            harness::config_from_json(j);
        } catch (const ConfigError& e) {
            return e.path;
        }
        return std::string("<no error>");
    };
    CHECK(path_of({{"plantx", 1}}) == "plantx");
    CHECK(path_of({{"plant", {{"bogus", 1}}}}) == "plant.bogus");
    CHECK(path_of({{"loop", {{"dt", "fast"}}}}) == "loop.dt");
    CHECK(path_of({{"loop", {{"dt", 0.5}}}}) == "loop.dt");  // out of range
    CHECK(path_of({{"gains", {{"steering", {{"kp", true}}}}}}) == "gains.steering.kp");
    CHECK(path_of({{"experiment", {{"target", {1.0, 2.0}}}}}) == "experiment.target");
    CHECK(path_of({{"seed", -1}}) == "seed");
    CHECK(path_of({{"model_k", 0.0}}) == "model_k");
    CHECK(path_of({{"experiment", {{"grid", {{"r_steps", 0}}}}}}) == "experiment.grid");
}

TEST_CASE("load_config distinguishes io from content errors") {
    TempDir tmp;
    CHECK_THROWS_AS(harness::load_config(tmp.path / "missing.json"), Error);
    fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{nope";
    CHECK_THROWS_AS(harness::load_config(bad), ConfigError);
    fs::path good = tmp.path / "good.json";
    std::ofstream(good) << R"({"seed": 7})";
    CHECK(harness::load_config(good).seed == 7);
}

TEST_CASE("run logs round trip byte for byte") {
    RunLog log;
    log.experiment = "unit";
    log.seed = 99;
    log.config_json = R"({"seed":99})";
    for (int i = 0; i < 5; ++i) {
        RunLogRow r;
        r.time_s = 0.1 * i;
        r.alpha_des = 30.0;
        r.theta_des = 45.0;
        r.alpha_real = 29.5 + 0.1 * i;
        r.theta_real = 44.0;
        r.mu_R = 1.0;
        r.mu_phi = {120.5, 60.25, 0.0};
        r.phi = {118.0, 59.0, 0.0};
        r.e_alpha = 30.0 - r.alpha_real;
        r.e_theta = 1.0;
        r.flags = (i == 0) ? (kFlagThetaUndefined | kFlagCommandClamped) : 0u;
        log.rows.push_back(r);
    }

    std::ostringstream first;
    write_runlog_csv(first, log);
    std::istringstream back(first.str());
    RunLog parsed = parse_runlog_csv(back);
    CHECK(parsed.experiment == "unit");
    CHECK(parsed.seed == 99);
    CHECK(parsed.config_json == log.config_json);
    REQUIRE(parsed.rows.size() == 5);
    CHECK(parsed.rows[0].flags == log.rows[0].flags);
    std::ostringstream second;
    write_runlog_csv(second, parsed);
    CHECK(first.str() == second.str());
}

TEST_CASE("run log parser rejects malformed input") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_runlog_csv(in);
    };
    const std::string header(kRunLogHeader);
    const std::string row = "0,1,30,45,1,29,44,1,0,0,0,0,0,0,0,1,1,";

    CHECK_THROWS_AS(parse("time_s,nope\n"), SchemaError);
    CHECK_THROWS_AS(parse(""), SchemaError);
    CHECK_NOTHROW(parse(header + "\n" + row + "\n"));

    // field count
    CHECK_THROWS_AS(parse(header + "\n0,1,2\n"), ParseError);
    // bad number
    CHECK_THROWS_AS(
        parse(header + "\n0,x,30,45,1,29,44,1,0,0,0,0,0,0,0,1,1,\n"), ParseError);
    // non-monotonic time
    CHECK_THROWS_AS(parse(header + "\n" + row + "\n" + row + "\n"), ParseError);
    // unknown flag token
    CHECK_THROWS_AS(
        parse(header + "\n0,1,30,45,1,29,44,1,0,0,0,0,0,0,0,1,1,wat\n"),
        ParseError);
    // unknown comments are skipped, known ones captured
    RunLog ok = parse("# tool: unit\n# experiment: abc\n" + header + "\n");
    CHECK(ok.experiment == "abc");
    CHECK(ok.rows.empty());
}

TEST_CASE("step-compare experiment writes parseable artifacts") {
    TempDir tmp;
    harness::Config cfg = small_config();
    auto lines = experiments::run_experiment("step-compare", cfg, tmp.path);
    CHECK(lines.size() == 2);

    for (const char* name : {"step_compare_ff.csv", "step_compare_noff.csv"}) {
        std::ifstream in(tmp.path / name, std::ios::binary);
        REQUIRE(in.good());
        RunLog log = parse_runlog_csv(in);
        CHECK(log.rows.size() == 60);  // 0.5 s at 120 Hz
        CHECK(log.seed == cfg.seed);
        CHECK_FALSE(log.config_json.empty());
    }
    auto summary = nlohmann::json::parse(slurp(tmp.path / "step_compare_summary.json"));
    CHECK(summary.contains("with_ff"));
    CHECK(summary.contains("without_ff"));
    CHECK(summary.contains("ff_settles_faster"));
    CHECK(summary["with_ff"].contains("sse_steering_deg"));
}

TEST_CASE("circle-sweep experiment writes parseable artifacts") {
    TempDir tmp;
    harness::Config cfg = small_config();
    auto lines = experiments::run_experiment("circle-sweep", cfg, tmp.path);
    CHECK(lines.size() == 1);

    std::ifstream in(tmp.path / "circle_sweep.csv", std::ios::binary);
    REQUIRE(in.good());
    RunLog log = parse_runlog_csv(in);
    CHECK(log.rows.size() == 12);  // 360 / 30 commands

    auto report = nlohmann::json::parse(slurp(tmp.path / "circle_sweep_report.json"));
    REQUIRE(report["levels"].size() == 1);
    CHECK(report["levels"][0]["sample_count"] == 12);
    CHECK(report["levels"][0]["alpha_level_deg"] == 10.4);
    CHECK(report["levels"][0].contains("seam_arc_width_deg"));
}

TEST_CASE("estimate-k experiment writes parseable artifacts") {
    TempDir tmp;
    harness::Config cfg = small_config();
    auto lines = experiments::run_experiment("estimate-k", cfg, tmp.path);
    CHECK(lines.size() == 2);

    std::ifstream in(tmp.path / "estimate_k_samples.csv", std::ios::binary);
    REQUIRE(in.good());
    auto samples = calibration::parse_mocap_csv(in);
    CHECK(samples.size() == 40);  // 2 conditions x 20

    auto report = nlohmann::json::parse(slurp(tmp.path / "estimate_k_report.json"));
    CHECK(std::abs(report["pooled"]["k_hat"].get<double>() - 0.104) < 0.005);
    CHECK(report["groups"].size() == 2);
    CHECK(report.contains("flagged"));
}

TEST_CASE("workspace-map experiment writes the full grid") {
    TempDir tmp;
    harness::Config cfg = small_config();
    experiments::run_experiment("workspace-map", cfg, tmp.path);
    std::string text = slurp(tmp.path / "workspace_map.csv");
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == experiments::kWorkspaceMapHeader);
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 3 * 3 * 4);  // (r_steps+1)(alpha_steps+1)theta_steps
}

TEST_CASE("unknown experiment names are rejected") {
    TempDir tmp;
    harness::Config cfg = small_config();
    CHECK_THROWS_AS(experiments::run_experiment("nope", cfg, tmp.path), OutOfRange);
}

TEST_CASE("experiments are deterministic given config and seed") {
    harness::Config cfg = small_config();
    std::ostringstream a, b;
    calibration::write_mocap_csv(a, experiments::estimate_k_experiment(cfg).samples);
    calibration::write_mocap_csv(b, experiments::estimate_k_experiment(cfg).samples);
    CHECK(a.str() == b.str());
    cfg.seed = 43;
    std::ostringstream c;
    calibration::write_mocap_csv(c, experiments::estimate_k_experiment(cfg).samples);
    CHECK(a.str() != c.str());
}

TEST_CASE("cli: kinematic queries print flat key=value lines") {
    if (!cli_available()) {
        MESSAGE("EVERKIN_CLI not set; skipping CLI tests");
        return;
    }
    CliResult r = run_cli("fk --phi 100 0 0");
    CHECK(r.code == 0);
    CHECK(r.out == "alpha=10.4 theta=0\n");

    r = run_cli("fk --phi 0 0 0");
    CHECK(r.code == 0);
    CHECK(r.out == "alpha=0 theta=undefined\n");

    r = run_cli("ik --alpha 10.4 --theta 0");
    CHECK(r.code == 0);
    CHECK(r.out == "phi=100 0 0\n");

    r = run_cli("ik --alpha 5.2 --theta 60");
    CHECK(r.code == 0);
    CHECK(r.out == "phi=50 50 0\n");

    r = run_cli("workspace --R 1 --alpha 30 --theta 45");
    CHECK(r.code == 0);
    CHECK(r.out == "in_workspace=true\n");

    r = run_cli("workspace --R 1.3 --alpha 30");
    CHECK(r.code == 0);
    CHECK(r.out == "in_workspace=false\n");
}

TEST_CASE("cli: exit codes distinguish usage, validation and io") {
    if (!cli_available()) {
        MESSAGE("EVERKIN_CLI not set; skipping CLI tests");
        return;
    }
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("frobnicate").code == 1);
    CHECK(run_cli("fk").code == 1);                      // missing required
    CHECK(run_cli("fk --phi 10 10 10").code == 1);       // motor rule
    CHECK(run_cli("ik --alpha 91 --theta 0").code == 1); // pitch ceiling
    CHECK(run_cli("experiment nope").code == 1);
    CHECK(run_cli("calibrate /nonexistent/input.csv").code == 2);
    CHECK(run_cli("sim --config /nonexistent/config.json --duration 0.1").code == 2);
}

TEST_CASE("cli: sim writes a run log and reports its kernel backend") {
    if (!cli_available()) {
        MESSAGE("EVERKIN_CLI not set; skipping CLI tests");
        return;
    }
    TempDir tmp;
    CliResult r = run_cli("sim --duration 0.5 --sag off --out " +
                          (tmp.path / "out").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("target pose:") != std::string::npos);
    CHECK(r.out.find("wrote ") != std::string::npos);

    std::ifstream in(tmp.path / "out" / "sim_runlog.csv", std::ios::binary);
    REQUIRE(in.good());
    RunLog log = parse_runlog_csv(in);
    CHECK(log.rows.size() == 60);
    CHECK(log.experiment == "sim");

    r = run_cli_env("EVERKIN_SIMD=scalar",
                    "sim --duration 0.1 --out " + (tmp.path / "out2").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("kernels: scalar") != std::string::npos);
}

TEST_CASE("cli: config file comes from --config or EVERKIN_CONFIG") {
    if (!cli_available()) {
        MESSAGE("EVERKIN_CLI not set; skipping CLI tests");
        return;
    }
    TempDir tmp;
    fs::path cfg_path = tmp.path / "cfg.json";
    std::ofstream(cfg_path) << R"({"seed": 777, "loop": {"duration": 0.1}})";

    CliResult r = run_cli("sim --config " + cfg_path.string() + " --out " +
                          (tmp.path / "a").string());
    CHECK(r.code == 0);
    CHECK(slurp(tmp.path / "a" / "sim_runlog.csv").find("# seed: 777") !=
          std::string::npos);

    r = run_cli_env("EVERKIN_CONFIG=" + cfg_path.string(),
                    "sim --out " + (tmp.path / "b").string());
    CHECK(r.code == 0);
    CHECK(slurp(tmp.path / "b" / "sim_runlog.csv").find("# seed: 777") !=
          std::string::npos);

    // --seed overrides whatever the config said
    r = run_cli("sim --config " + cfg_path.string() + " --seed 5 --out " +
                (tmp.path / "c").string());
    CHECK(r.code == 0);
    CHECK(slurp(tmp.path / "c" / "sim_runlog.csv").find("# seed: 5") !=
          std::string::npos);

    std::ofstream(tmp.path / "broken.json") << "{nope";
    r = run_cli("sim --config " + (tmp.path / "broken.json").string());
    CHECK(r.code == 1);
}

TEST_CASE("cli: calibrate fits a coefficient from a mocap log") {
    if (!cli_available()) {
        MESSAGE("EVERKIN_CLI not set; skipping CLI tests");
        return;
    }
    TempDir tmp;
    harness::Config cfg = small_config();
    cfg.experiment.noise_sigma_deg = 0.0;
    auto samples = experiments::estimate_k_experiment(cfg).samples;
    fs::path csv_path = tmp.path / "mocap.csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        calibration::write_mocap_csv(out, samples);
    }
    CliResult r = run_cli("calibrate " + csv_path.string() + " --report --out " +
                          (tmp.path / "rep").string());
    CHECK(r.code == 0);
    CHECK(r.out.find("k_hat=0.104") != std::string::npos);
    CHECK(r.out.find("condition spread=") != std::string::npos);
    auto report = nlohmann::json::parse(slurp(tmp.path / "rep" / "calibration_report.json"));
    CHECK(report["pooled"]["n_samples"] == 40);
    CHECK(report["groups"].size() == 2);
}
