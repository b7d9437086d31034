#pragma once
// Plain-text experiment configuration: key=value lines, '#' comments, and
// optional [experiment-name] sections whose keys apply only when that
// experiment is selected. Unknown keys are errors with line numbers.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebc/model.hpp"

namespace wavebc {

enum class Experiment {
    energy_audit,
    absorbing_set,
    split_decay,
    compare,
    sweep,
    omega_limit,
    robin_demo,
};

const char* experiment_name(Experiment e);

struct Config {
    Experiment experiment = Experiment::energy_audit;

    // mesh
    int n = 201;
    double L = 1.0;

    // nonlinearity
    NlKind nl_kind = NlKind::double_well;
    double k = 1.0;                    // double_well parameter
    double a3 = 0.0, a1 = 0.0, a0 = 0.0;  // cubic_poly coefficients

    // time discretization
    double dt = 1e-3;
    double T = 0.0;          // 0 = per-experiment default
    double sample_dt = 0.0;  // 0 = per-experiment default

    // boundary condition (energy_audit only; other experiments fix it)
    BcMode mode = BcMode::acoustic;

    // eps: single value or grid, depending on the experiment schema
    double eps = 1.0;
    std::vector<double> eps_grid;

    // seeds
    int seeds = 3;
    std::uint64_t rng_seed = 1;
    double seed_radius = 5.0;

    // compare / sweep initial data: random boundary oscillator data on, or
    // compatible (zeroed) boundary data off
    bool boundary_data = true;

    // omega_limit timing
    double burn_in = 0.0;  // 0 = default
    double window = 0.0;
    double cadence = 0.0;

    // energy audit tolerance and order study
    double residual_tol = 1e-7;
    bool order_study = true;

    std::string output_dir;  // may be overridden by --output-dir
    int threads = 1;
};

// Thrown for malformed or invalid configuration input; message carries the
// line number where applicable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Config parse_config(const std::string& text);
Config parse_config_file(const std::string& path);

// Fill T / sample_dt / burn_in / window / cadence defaults for the selected
// experiment. parse_config applies this automatically.
void apply_experiment_defaults(Config& cfg);

}  // namespace wavebc
