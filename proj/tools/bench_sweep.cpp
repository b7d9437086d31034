// Benchmark of the epsilon sweep: serial reference path (threads = 1) against
// the OpenMP path, with a bitwise identity check on the results. Not a test;
// build target `bench_sweep`.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "wavebc/attractor.hpp"
#include "wavebc/mesh.hpp"
#include "wavebc/model.hpp"

using namespace wavebc;

int main(int argc, char** argv) {
    int n = 201;
    double T = 2.0;
    int seeds = 3;
    int repeats = 3;
    int max_threads =
#ifdef _OPENMP
        omp_get_max_threads();
#else
        1;
#endif

    CLI::App app{"epsilon sweep benchmark: serial reference vs OpenMP"};
    app.add_option("--n", n, "mesh nodes")->check(CLI::PositiveNumber);
    app.add_option("--T", T, "horizon per trajectory")->check(CLI::PositiveNumber);
    app.add_option("--seeds", seeds, "seeds per eps")->check(CLI::PositiveNumber);
    app.add_option("--repeats", repeats, "timed repetitions, best kept")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-threads", max_threads, "largest thread count to time")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const Mesh mesh = build_mesh(n, 1.0);
    const Nonlinearity nl = make_double_well(1.0);
    const std::vector<double> grid = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    const auto seed_data = make_compare_seeds(mesh, seeds, 1, 0.01, 1.0);

    std::printf("epsilon sweep: n=%d, T=%g, %d eps values x %d seeds, %d repeats\n",
                n, T, (int)grid.size(), seeds, repeats);
#ifndef _OPENMP
    std::printf("note: built without OpenMP; every run uses the serial path\n");
#endif

    auto timed = [&](int threads) {
        double best = 1e300;
        SweepResult last;
        for (int r = 0; r < repeats; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            last = epsilon_sweep(mesh, nl, grid, seed_data, 1e-3, T, 0.01, threads);
            const auto t1 = std::chrono::steady_clock::now();
            best = std::min(best,
                            std::chrono::duration<double>(t1 - t0).count());
        }
        return std::pair<double, SweepResult>(best, last);
    };

    const auto [serial_time, serial] = timed(1);
    std::printf("%8s %12s %9s %s\n", "threads", "seconds", "speedup", "identical");
    std::printf("%8d %12.4f %9.2f %s\n", 1, serial_time, 1.0, "reference");

    bool all_identical = true;
    for (int threads = 2; threads <= max_threads; ++threads) {
        const auto [time, result] = timed(threads);
        const bool identical =
            result.D == serial.D && result.D_seed == serial.D_seed &&
            result.rho == serial.rho && result.logC == serial.logC;
        all_identical = all_identical && identical;
        std::printf("%8d %12.4f %9.2f %s\n", threads, time, serial_time / time,
                    identical ? "yes" : "NO");
    }

    std::printf("fit: rho=%.6f, max log residual=%.3e\n", serial.rho,
                serial.max_log_residual);
    if (!all_identical) {
        std::printf("error: parallel results differ from the serial reference\n");
        return 1;
    }
    return 0;
}
