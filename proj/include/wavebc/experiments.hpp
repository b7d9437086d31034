#pragma once
// Experiment dispatch: run the configured experiment, write its CSV artifacts
// and summary.txt into the output directory, and report the audit verdict.

#include <string>

#include "wavebc/config.hpp"

namespace wavebc {

// Exit codes of the command line driver.
enum ExitCode {
    exit_ok = 0,
    exit_audit_failure = 1,
    exit_config_error = 2,
    exit_runtime_failure = 3,
};

// Runs cfg.experiment, writing artifacts into output_dir (created if absent).
// Returns exit_ok or exit_audit_failure; throws on I/O or solver failure
// (mapped to exit_runtime_failure by the driver).
int run_experiment(const Config& cfg, const std::string& output_dir);

}  // namespace wavebc
