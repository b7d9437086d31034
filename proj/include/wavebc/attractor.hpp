#pragma once
// Long-time comparison tools: clouds of late-time states, the Hausdorff
// semidistance between clouds, lockstep comparison of the eps dynamics with
// the lifted limit dynamics, and the epsilon sweep measuring the closeness
// rate of the two.

#include <cstdint>
#include <vector>

#include "wavebc/integrator.hpp"

namespace wavebc {

// A finite set of states sampled from the late-time dynamics at one eps.
struct Cloud {
    BcMode mode = BcMode::acoustic;
    double eps = 0.0;
    std::vector<State> members;
};

// One-sided Hausdorff distance sup_{a in A} inf_{b in B} ||a - b|| in the
// eps-weighted phase space norm (pass eps = 0 for the limit-space norm with
// the |delta|^2 slot kept).
double hausdorff_semidist(const Mesh& mesh, const std::vector<State>& A,
                          const std::vector<State>& B, double eps);

// Evolve each seed for T_burn, then collect states every cadence over a
// window of length T_window.
Cloud sample_omega_limit(const Mesh& mesh, const Nonlinearity& nl, BcMode mode,
                         double eps, const std::vector<State>& seeds,
                         double T_burn, double T_window, double cadence,
                         double dt);

// Seed data for the comparison of the eps dynamics with the limit dynamics:
// interior displacement and velocity plus free boundary data (d0p, d1p). The
// acoustic initial state at eps is
//   delta(0) = u0|_G + eps * d0p,   gamma(0) = d1p,
// and the limit trajectory starts from (u0, v0).
struct CompareSeed {
    Vec u0;
    Vec v0;
    std::array<double, 2> d0p = {0.0, 0.0};
    std::array<double, 2> d1p = {0.0, 0.0};
};

State acoustic_initial(const Mesh& mesh, const CompareSeed& seed, double eps);

// Deterministic seed generator: u0 and v0 from low sine modes with zero
// boundary trace, scaled so the interior part has norm interior_amp, and
// O(1) boundary data scaled by boundary_amp.
std::vector<CompareSeed> make_compare_seeds(const Mesh& mesh, int count,
                                            std::uint64_t rng_seed,
                                            double interior_amp,
                                            double boundary_amp);

// Generic random smooth states of prescribed phase space norm (measured at
// eps = 1), for absorbing set experiments and cloud seeding.
std::vector<State> make_random_states(const Mesh& mesh, int count,
                                      std::uint64_t rng_seed, double radius,
                                      double mean_shift = 0.0);

// Lockstep comparison: advance the acoustic trajectory from
// acoustic_initial(seed, eps) and the limit trajectory from (u0, v0), and
// record || z_eps(t) - lift(z_0(t)) || in the eps norm at every sample.
struct CompareResult {
    std::vector<double> ts;
    std::vector<double> diff;  // phase space distance at each sample
    double sup_diff = 0.0;
};

CompareResult compare_trajectories(const Mesh& mesh, const Nonlinearity& nl,
                                   double eps, const CompareSeed& seed,
                                   double dt, double T, double sample_dt);

// Distances D(eps) = max over seeds of the sup difference, with the power fit
// log D = rho * log eps + log C. Trajectories are independent, so the sweep
// runs them in parallel when threads > 1; results are written into
// preallocated slots and identical to the serial order.
struct SweepResult {
    std::vector<double> eps_grid;
    std::vector<double> D;                      // one distance per eps
    std::vector<std::vector<double>> D_seed;    // per eps, per seed
    std::vector<int> excluded;  // grid indices with exactly zero distance
    double rho = 0.0;
    double logC = 0.0;
    double max_log_residual = 0.0;  // max |log D_i - (logC + rho log eps_i)|
};

SweepResult epsilon_sweep(const Mesh& mesh, const Nonlinearity& nl,
                          const std::vector<double>& eps_grid,
                          const std::vector<CompareSeed>& seeds, double dt,
                          double T, double sample_dt, int threads);

// Cloud-level closeness of the eps dynamics to the lifted limit dynamics:
// for each eps, the Hausdorff semidistance from the acoustic late-time cloud
// to the lifted limit cloud, both grown from the same seeds.
struct SemicontinuityReport {
    std::vector<double> eps_list;
    std::vector<double> dist;
    std::vector<int> cloud_size;            // members in each acoustic cloud
    std::vector<double> max_member_norm;    // max phase space norm per cloud
    int limit_cloud_size = 0;
    double limit_max_norm = 0.0;
};

SemicontinuityReport upper_semicontinuity_report(
    const Mesh& mesh, const Nonlinearity& nl, const std::vector<double>& eps_list,
    const std::vector<CompareSeed>& seeds, double T_burn, double T_window,
    double cadence, double dt);

}  // namespace wavebc
