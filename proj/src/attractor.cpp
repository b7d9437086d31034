#include "wavebc/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wavebc {

namespace {

constexpr double pi = 3.14159265358979323846;

// Portable uniform draw in [-1, 1): fixed 53-bit mapping of the raw engine
// output, so streams are bit-identical across platforms and toolchains.
double uniform_pm1(std::mt19937_64& rng) {
    const double u01 = (double)(rng() >> 11) * (1.0 / 9007199254740992.0);
    return 2.0 * u01 - 1.0;
}

double diff_norm_sq(const Mesh& mesh, const State& a, const State& b, double eps,
                    Vec& work) {
    const int n = mesh.n;
    work.resize(n);
    for (int i = 0; i < n; ++i) work[i] = a.u[i] - b.u[i];
    double s = h1_norm_sq(mesh, work);
    for (int i = 0; i < n; ++i) work[i] = a.v[i] - b.v[i];
    s += l2_norm_sq(mesh, work);
    for (int j = 0; j < 2; ++j) {
        const double dd = a.delta[j] - b.delta[j];
        const double dg = a.gamma[j] - b.gamma[j];
        s += dd * dd + eps * dg * dg;
    }
    return s;
}

}  // namespace

double hausdorff_semidist(const Mesh& mesh, const std::vector<State>& A,
                          const std::vector<State>& B, double eps) {
    if (A.empty() || B.empty())
        throw std::invalid_argument("hausdorff_semidist: empty cloud");
    Vec work;
    double worst = 0.0;
    for (const State& a : A) {
        double best = -1.0;
        for (const State& b : B) {
            const double d = diff_norm_sq(mesh, a, b, eps, work);
            if (best < 0.0 || d < best) best = d;
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

Cloud sample_omega_limit(const Mesh& mesh, const Nonlinearity& nl, BcMode mode,
                         double eps, const std::vector<State>& seeds,
                         double T_burn, double T_window, double cadence,
                         double dt) {
    if (seeds.empty()) throw std::invalid_argument("sample_omega_limit: no seeds");
    Cloud cloud;
    cloud.mode = mode;
    cloud.eps = (mode == BcMode::acoustic) ? eps : 0.0;
    Stepper stp = make_stepper(mesh, nl, mode, eps, dt);
    for (const State& seed : seeds) {
        State burned = run(stp, seed, T_burn, T_burn);
        std::vector<State> samples;
        run(stp, burned, T_window, cadence, nullptr, &samples);
        for (State& s : samples) cloud.members.push_back(std::move(s));
    }
    return cloud;
}

State acoustic_initial(const Mesh& mesh, const CompareSeed& seed, double eps) {
    if ((int)seed.u0.size() != mesh.n || (int)seed.v0.size() != mesh.n)
        throw std::invalid_argument("acoustic_initial: seed does not match mesh");
    State st;
    st.u = seed.u0;
    st.v = seed.v0;
    st.delta = {seed.u0.front() + eps * seed.d0p[0],
                seed.u0.back() + eps * seed.d0p[1]};
    st.gamma = {seed.d1p[0], seed.d1p[1]};
    st.eps = eps;
    return st;
}

std::vector<CompareSeed> make_compare_seeds(const Mesh& mesh, int count,
                                            std::uint64_t rng_seed,
                                            double interior_amp,
                                            double boundary_amp) {
    std::mt19937_64 rng(rng_seed);
    std::vector<CompareSeed> seeds;
    seeds.reserve(count);
    const int n = mesh.n;
    for (int s = 0; s < count; ++s) {
        CompareSeed cs;
        cs.u0.assign(n, 0.0);
        cs.v0.assign(n, 0.0);
        // Antisymmetric design: even sine modes for the interior and paired
        // boundary data (b,-b), (a,-a). With an odd nonlinearity on a
        // symmetric interval the perturbation/limit difference field then
        // stays in the antisymmetric subspace, where -u'' + u + f'(0) u is
        // coercive (lowest mode 1 + 4 pi^2 / L^2); the near-constant mode
        // that the double well destabilizes is never excited, so the
        // boundary-layer scaling is not masked by amplified interior growth.
        double au[2], av[2];
        for (double& c : au) c = uniform_pm1(rng);
        for (double& c : av) c = uniform_pm1(rng);
        for (int i = 0; i < n; ++i) {
            double su = 0.0, sv = 0.0;
            for (int k = 0; k < 2; ++k) {
                const double ph =
                    std::sin(2.0 * (k + 1) * pi * mesh.x[i] / mesh.L);
                su += au[k] * ph;
                sv += av[k] * ph;
            }
            cs.u0[i] = su;
            cs.v0[i] = sv;
        }
        // Scale the interior part to the requested amplitude in the phase
        // space norm; sine modes keep the boundary trace of u0 at zero.
        const double norm =
            std::sqrt(h1_norm_sq(mesh, cs.u0) + l2_norm_sq(mesh, cs.v0));
        const double scale = (norm > 0.0) ? interior_amp / norm : 0.0;
        for (int i = 0; i < n; ++i) {
            cs.u0[i] *= scale;
            cs.v0[i] *= scale;
        }
        const double b = boundary_amp * uniform_pm1(rng);
        const double a = boundary_amp * uniform_pm1(rng);
        cs.d0p = {b, -b};
        cs.d1p = {a, -a};
        seeds.push_back(std::move(cs));
    }
    return seeds;
}

std::vector<State> make_random_states(const Mesh& mesh, int count,
                                      std::uint64_t rng_seed, double radius,
                                      double mean_shift) {
    std::mt19937_64 rng(rng_seed);
    std::vector<State> states;
    states.reserve(count);
    const int n = mesh.n;
    for (int s = 0; s < count; ++s) {
        State st = make_state(mesh, 1.0);
        double au[5], av[5];
        for (int k = 0; k < 5; ++k) au[k] = uniform_pm1(rng);
        for (int k = 0; k < 5; ++k) av[k] = uniform_pm1(rng);
        for (int i = 0; i < n; ++i) {
            double su = mean_shift, sv = 0.0;
            for (int k = 0; k < 5; ++k) {
                const double ph = std::cos(k * pi * mesh.x[i] / mesh.L);
                su += au[k] * ph;
                sv += av[k] * ph;
            }
            st.u[i] = su;
            st.v[i] = sv;
        }
        for (int j = 0; j < 2; ++j) st.delta[j] = uniform_pm1(rng);
        for (int j = 0; j < 2; ++j) st.gamma[j] = uniform_pm1(rng);
        const double norm = std::sqrt(norm_Heps_sq(mesh, st));
        const double scale = (norm > 0.0) ? radius / norm : 0.0;
        for (int i = 0; i < n; ++i) {
            st.u[i] *= scale;
            st.v[i] *= scale;
        }
        for (int j = 0; j < 2; ++j) {
            st.delta[j] *= scale;
            st.gamma[j] *= scale;
        }
        states.push_back(std::move(st));
    }
    return states;
}

CompareResult compare_trajectories(const Mesh& mesh, const Nonlinearity& nl,
                                   double eps, const CompareSeed& seed,
                                   double dt, double T, double sample_dt) {
    Stepper ac = make_stepper(mesh, nl, BcMode::acoustic, eps, dt);
    Stepper tr = make_stepper(mesh, nl, BcMode::transport, 0.0, dt);

    State za = acoustic_initial(mesh, seed, eps);
    State zt;
    zt.u = seed.u0;
    zt.v = seed.v0;
    zt.eps = 0.0;

    const long long steps = std::max(1LL, (long long)std::llround(T / dt));
    const long long stride =
        std::max(1LL, (long long)std::llround(std::max(sample_dt, dt) / dt));

    CompareResult res;
    Vec work;
    auto record = [&](double t) {
        const State lifted = lift(zt.u, zt.v, eps, t);
        const double d = std::sqrt(diff_norm_sq(mesh, za, lifted, eps, work));
        res.ts.push_back(t);
        res.diff.push_back(d);
        res.sup_diff = std::max(res.sup_diff, d);
    };
    record(0.0);
    for (long long i = 1; i <= steps; ++i) {
        za = step(ac, za);
        zt = step(tr, zt);
        if (i % stride == 0 || i == steps) record((double)i * dt);
    }
    return res;
}

SweepResult epsilon_sweep(const Mesh& mesh, const Nonlinearity& nl,
                          const std::vector<double>& eps_grid,
                          const std::vector<CompareSeed>& seeds, double dt,
                          double T, double sample_dt, int threads) {
    if (eps_grid.size() < 2)
        throw std::invalid_argument("epsilon_sweep: need at least 2 eps values");
    if (seeds.empty()) throw std::invalid_argument("epsilon_sweep: no seeds");

    const int ne = (int)eps_grid.size();
    const int ns = (int)seeds.size();
    SweepResult res;
    res.eps_grid = eps_grid;
    res.D_seed.assign(ne, std::vector<double>(ns, 0.0));

    // Independent trajectories written into preallocated slots: the result is
    // identical for any thread count, including the serial path.
    const int total = ne * ns;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
#endif
    for (int idx = 0; idx < total; ++idx) {
        const int e = idx / ns;
        const int s = idx % ns;
        res.D_seed[e][s] =
            compare_trajectories(mesh, nl, eps_grid[e], seeds[s], dt, T, sample_dt)
                .sup_diff;
    }
    (void)threads;

    res.D.assign(ne, 0.0);
    for (int e = 0; e < ne; ++e) {
        double worst = 0.0;
        for (int s = 0; s < ns; ++s) worst = std::max(worst, res.D_seed[e][s]);
        res.D[e] = worst;
        // A distance of exactly zero is degenerate (log undefined); the point
        // is excluded from the fit and flagged rather than aborting the sweep.
        if (!(worst > 0.0)) res.excluded.push_back(e);
    }
    const auto is_excluded = [&res](int e) {
        return std::find(res.excluded.begin(), res.excluded.end(), e) !=
               res.excluded.end();
    };

    // Power-law fit log D = rho log eps + log C over the retained points.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = 0;
    for (int e = 0; e < ne; ++e) {
        if (is_excluded(e)) continue;
        const double x = std::log(eps_grid[e]);
        const double y = std::log(res.D[e]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw std::runtime_error("epsilon_sweep: fewer than 2 usable points");
    const double denom = m * sxx - sx * sx;
    res.rho = (m * sxy - sx * sy) / denom;
    res.logC = (sy - res.rho * sx) / m;
    res.max_log_residual = 0.0;
    for (int e = 0; e < ne; ++e) {
        if (is_excluded(e)) continue;
        const double pred = res.logC + res.rho * std::log(eps_grid[e]);
        res.max_log_residual =
            std::max(res.max_log_residual, std::abs(std::log(res.D[e]) - pred));
    }
    return res;
}

SemicontinuityReport upper_semicontinuity_report(
    const Mesh& mesh, const Nonlinearity& nl, const std::vector<double>& eps_list,
    const std::vector<CompareSeed>& seeds, double T_burn, double T_window,
    double cadence, double dt) {
    if (eps_list.empty())
        throw std::invalid_argument("upper_semicontinuity_report: no eps values");

    // Limit cloud once: it does not depend on eps.
    std::vector<State> limit_seeds;
    for (const CompareSeed& s : seeds) {
        State st;
        st.u = s.u0;
        st.v = s.v0;
        st.eps = 0.0;
        limit_seeds.push_back(std::move(st));
    }
    Cloud limit = sample_omega_limit(mesh, nl, BcMode::transport, 0.0, limit_seeds,
                                     T_burn, T_window, cadence, dt);

    SemicontinuityReport rep;
    rep.eps_list = eps_list;
    rep.dist.resize(eps_list.size());
    rep.cloud_size.resize(eps_list.size());
    rep.max_member_norm.resize(eps_list.size());
    rep.limit_cloud_size = (int)limit.members.size();
    for (const State& m : limit.members)
        rep.limit_max_norm = std::max(rep.limit_max_norm, std::sqrt(norm_Heps_sq(mesh, m)));
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const double eps = eps_list[e];
        std::vector<State> ac_seeds;
        for (const CompareSeed& s : seeds)
            ac_seeds.push_back(acoustic_initial(mesh, s, eps));
        Cloud cloud = sample_omega_limit(mesh, nl, BcMode::acoustic, eps, ac_seeds,
                                         T_burn, T_window, cadence, dt);
        rep.cloud_size[e] = (int)cloud.members.size();
        double mx = 0.0;
        for (const State& m : cloud.members)
            mx = std::max(mx, std::sqrt(norm_Heps_sq(mesh, m)));
        rep.max_member_norm[e] = mx;
        std::vector<State> lifted;
        lifted.reserve(limit.members.size());
        for (const State& m : limit.members) lifted.push_back(lift(m.u, m.v, eps, m.t));
        rep.dist[e] = hausdorff_semidist(mesh, cloud.members, lifted, eps);
    }
    return rep;
}

}  // namespace wavebc
