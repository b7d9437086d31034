// Command line driver:
//   wavebc run <config-path> [--output-dir D] [--threads N]
// Exit codes: 0 all audits pass, 1 an audited invariant fails, 2 bad
// configuration, 3 runtime failure (I/O, solver divergence).

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "wavebc/config.hpp"
#include "wavebc/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for a damped semilinear wave equation "
                 "with an oscillator-type boundary condition"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int threads = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "run the experiment described "
                                                  "by a config file");
    run_cmd->add_option("config", config_path, "path to the config file")
        ->required();
    run_cmd->add_option("--output-dir", output_dir,
                        "output directory (overrides the config)");
    run_cmd->add_option("--threads", threads,
                        "worker threads for the eps sweep (overrides the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : wavebc::exit_config_error;
    }

    wavebc::Config cfg;
    try {
        cfg = wavebc::parse_config_file(config_path);
    } catch (const wavebc::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return wavebc::exit_config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return wavebc::exit_config_error;
    }

    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (cfg.output_dir.empty())
        cfg.output_dir = std::string("out_") + wavebc::experiment_name(cfg.experiment);
    if (threads > 0) cfg.threads = threads;

    try {
        const int code = wavebc::run_experiment(cfg, cfg.output_dir);
        std::printf("%s: %s (exit %d)\n", wavebc::experiment_name(cfg.experiment),
                    code == wavebc::exit_ok ? "PASS" : "FAIL", code);
        std::printf("artifacts in %s\n", cfg.output_dir.c_str());
        return code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return wavebc::exit_runtime_failure;
    }
}
