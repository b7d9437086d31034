#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "wavebc/attractor.hpp"
#include "wavebc/mesh.hpp"
#include "wavebc/model.hpp"

using namespace wavebc;
using testutil::random_state;

namespace {

// Independent mirror of the cloud semidistance: same scalar recurrence, so the
// result must agree bitwise with the library implementation.
double mirror_semidist(const Mesh& mesh, const std::vector<State>& A,
                       const std::vector<State>& B, double eps) {
    Vec du(mesh.n), dv(mesh.n);
    double worst = 0.0;
    for (const State& a : A) {
        double best = -1.0;
        for (const State& b : B) {
            for (int i = 0; i < mesh.n; ++i) du[i] = a.u[i] - b.u[i];
            double s = h1_norm_sq(mesh, du);
            for (int i = 0; i < mesh.n; ++i) dv[i] = a.v[i] - b.v[i];
            s += l2_norm_sq(mesh, dv);
            for (int j = 0; j < 2; ++j) {
                const double dd = a.delta[j] - b.delta[j];
                const double dg = a.gamma[j] - b.gamma[j];
                s += dd * dd + eps * dg * dg;
            }
            if (best < 0.0 || s < best) best = s;
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

// Second, structurally different oracle: assembled-matrix quadratic forms
// instead of the element-wise accumulation.
double assembled_semidist(const Mesh& mesh, const std::vector<State>& A,
                          const std::vector<State>& B, double eps) {
    Vec du(mesh.n), dv(mesh.n);
    double worst = 0.0;
    for (const State& a : A) {
        double best = -1.0;
        for (const State& b : B) {
            for (int i = 0; i < mesh.n; ++i) {
                du[i] = a.u[i] - b.u[i];
                dv[i] = a.v[i] - b.v[i];
            }
            double s = tridiag_quad(mesh.stiff_mass, du) + tridiag_quad(mesh.mass, dv);
            for (int j = 0; j < 2; ++j) {
                const double dd = a.delta[j] - b.delta[j];
                const double dg = a.gamma[j] - b.gamma[j];
                s += dd * dd + eps * dg * dg;
            }
            if (best < 0.0 || s < best) best = s;
        }
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

State constant_state(const Mesh& mesh, double c) {
    State st = make_state(mesh, 1.0);
    st.u.assign(mesh.n, c);
    return st;
}

}  // namespace

TEST_SUITE("attractor") {

TEST_CASE("cloud semidistance: hand values and metric properties") {
    const Mesh mesh = build_mesh(9, 1.0);
    // constant states u = c have ||u||_1^2 = c^2 L, so distances are |c - c'|
    const std::vector<State> A = {constant_state(mesh, 0.0), constant_state(mesh, 3.0)};
    const std::vector<State> B = {constant_state(mesh, 1.0)};
    CHECK(hausdorff_semidist(mesh, A, B, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hausdorff_semidist(mesh, B, A, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::vector<State> C;
    for (int i = 0; i < 4; ++i) C.push_back(random_state(rng, mesh, 1.0));

    // identical clouds are at distance zero; a subset is contained in the whole
    CHECK(hausdorff_semidist(mesh, C, C, 1.0) == 0.0);
    CHECK(hausdorff_semidist(mesh, {C[1]}, C, 1.0) == 0.0);

    // a small perturbation is detected
    std::vector<State> Cp = C;
    for (State& st : Cp) st.u[3] += 1e-9;
    CHECK(hausdorff_semidist(mesh, Cp, C, 1.0) > 1e-12);

    // triangle inequality dist(A,C) <= dist(A,B) + dist(B,C) on random triples
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<State> X, Y, Z;
        for (int i = 0; i < 3; ++i) {
            X.push_back(random_state(rng, mesh, 1.0));
            Y.push_back(random_state(rng, mesh, 1.0));
            Z.push_back(random_state(rng, mesh, 1.0));
        }
        const double xz = hausdorff_semidist(mesh, X, Z, 0.3);
        const double xy = hausdorff_semidist(mesh, X, Y, 0.3);
        const double yz = hausdorff_semidist(mesh, Y, Z, 0.3);
        CHECK(xz <= xy + yz + 1e-12);
    }

    CHECK_THROWS_AS(hausdorff_semidist(mesh, {}, B, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff_semidist(mesh, A, {}, 1.0), std::invalid_argument);
}

TEST_CASE("cloud semidistance agrees with independent oracles") {
    const Mesh mesh = build_mesh(7, 1.0);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<State> A, B;
        for (int i = 0; i < 3; ++i) A.push_back(random_state(rng, mesh, 0.7));
        for (int i = 0; i < 4; ++i) B.push_back(random_state(rng, mesh, 0.7));
        const double eps = (trial % 2) ? 0.25 : 1.0;
        const double lib = hausdorff_semidist(mesh, A, B, eps);
        CHECK(lib == mirror_semidist(mesh, A, B, eps));
        CHECK(lib == doctest::Approx(assembled_semidist(mesh, A, B, eps))
                         .epsilon(1e-12));
    }
}

TEST_CASE("omega limit sampling collapses a dissipative linear flow") {
    const Mesh mesh = build_mesh(31, 1.0);
    const Nonlinearity nl = make_zero();
    std::vector<State> seeds;
    for (const State& st : make_random_states(mesh, 2, 3, 1.0))
        seeds.push_back(project(st));

    const Cloud cloud = sample_omega_limit(mesh, nl, BcMode::transport, 0.0, seeds,
                                           60.0, 4.0, 1.0, 2e-3);
    CHECK(cloud.eps == 0.0);
    REQUIRE(cloud.members.size() == 10);  // 2 seeds x window samples {0,1,2,3,4}
    for (const State& m : cloud.members) {
        CHECK(m.t >= 60.0 - 1e-9);
        CHECK(m.t <= 64.0 + 1e-9);
    }
    // everything has decayed to the origin: the cloud has collapsed
    const double diam_bound =
        hausdorff_semidist(mesh, cloud.members, {cloud.members[0]}, 0.0);
    CHECK(diam_bound <= 1e-3);

    CHECK_THROWS_AS(
        sample_omega_limit(mesh, nl, BcMode::transport, 0.0, {}, 1.0, 1.0, 1.0, 1e-3),
        std::invalid_argument);
}

TEST_CASE("comparison seeds: determinism, zero trace, antisymmetric boundary data") {
    const Mesh mesh = build_mesh(51, 1.0);
    const auto seeds = make_compare_seeds(mesh, 3, 42, 0.01, 1.0);
    const auto again = make_compare_seeds(mesh, 3, 42, 0.01, 1.0);
    REQUIRE(seeds.size() == 3);
    for (int s = 0; s < 3; ++s) {
        CHECK(seeds[s].u0 == again[s].u0);
        CHECK(seeds[s].v0 == again[s].v0);
        CHECK(seeds[s].d0p == again[s].d0p);
        // sine modes: boundary trace of the interior data vanishes
        CHECK(std::abs(seeds[s].u0.front()) <= 1e-12);
        CHECK(std::abs(seeds[s].u0.back()) <= 1e-12);
        // interior part scaled to the requested amplitude
        const double nrm = std::sqrt(h1_norm_sq(mesh, seeds[s].u0) +
                                     l2_norm_sq(mesh, seeds[s].v0));
        CHECK(nrm == doctest::Approx(0.01).epsilon(1e-9));
        // paired boundary data (b, -b), (a, -a)
        CHECK(seeds[s].d0p[1] == -seeds[s].d0p[0]);
        CHECK(seeds[s].d1p[1] == -seeds[s].d1p[0]);
        CHECK(std::abs(seeds[s].d0p[0]) <= 1.0);
    }
}

TEST_CASE("random state generator: norm scaling and determinism") {
    const Mesh mesh = build_mesh(41, 1.0);
    const auto states = make_random_states(mesh, 5, 9, 2.5);
    const auto again = make_random_states(mesh, 5, 9, 2.5);
    REQUIRE(states.size() == 5);
    for (int s = 0; s < 5; ++s) {
        CHECK(states[s].u == again[s].u);
        CHECK(states[s].gamma == again[s].gamma);
        CHECK(std::sqrt(norm_Heps_sq(mesh, states[s])) ==
              doctest::Approx(2.5).epsilon(1e-9));
    }
    // the mean shift moves the displacement average without breaking the norm
    const auto shifted = make_random_states(mesh, 1, 9, 2.5, 1.0);
    CHECK(std::sqrt(norm_Heps_sq(mesh, shifted[0])) ==
          doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("acoustic initial state convention") {
    const Mesh mesh = build_mesh(5, 1.0);
    CompareSeed seed;
    seed.u0 = {1.0, 2.0, 3.0, 4.0, 5.0};
    seed.v0 = {0.0, 0.0, 0.0, 0.0, 0.0};
    seed.d0p = {0.3, -0.2};
    seed.d1p = {0.1, 0.4};
    const State st = acoustic_initial(mesh, seed, 0.5);
    CHECK(st.eps == 0.5);
    CHECK(st.u == seed.u0);
    CHECK(st.delta[0] == doctest::Approx(1.15).epsilon(1e-15));
    CHECK(st.delta[1] == doctest::Approx(4.9).epsilon(1e-15));
    CHECK(st.gamma[0] == 0.1);
    CHECK(st.gamma[1] == 0.4);

    CompareSeed bad;
    bad.u0 = {1.0, 2.0};
    bad.v0 = {0.0, 0.0};
    CHECK_THROWS_AS(acoustic_initial(mesh, bad, 0.5), std::invalid_argument);
}

TEST_CASE("lockstep comparison: hand value at t = 0 and sampling") {
    const Mesh mesh = build_mesh(5, 1.0);
    const Nonlinearity nl = make_zero();
    CompareSeed seed;
    seed.u0 = mesh.x;
    seed.v0.resize(mesh.n);
    for (int i = 0; i < mesh.n; ++i) seed.v0[i] = 1.0 + mesh.x[i];
    seed.d0p = {0.3, -0.2};
    seed.d1p = {0.1, 0.4};
    const double eps = 0.25;

    const CompareResult res = compare_trajectories(mesh, nl, eps, seed, 1e-3, 1.0, 0.1);
    REQUIRE(res.ts.size() == 11);
    CHECK(res.ts.front() == 0.0);
    CHECK(res.ts.back() == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(res.diff.size() == res.ts.size());

    // at t = 0 the interior parts coincide; only the boundary slots differ:
    //   delta: (u0 + eps d0p) - eps u0 = (0.075, 0.7)
    //   gamma: d1p - (-v0)            = (1.1, 2.4)
    const double d0 = std::sqrt(0.075 * 0.075 + 0.7 * 0.7 +
                                eps * (1.1 * 1.1 + 2.4 * 2.4));
    CHECK(res.diff[0] == doctest::Approx(d0).epsilon(1e-12));
    CHECK(res.sup_diff == *std::max_element(res.diff.begin(), res.diff.end()));
    CHECK(res.sup_diff > 0.0);
}

TEST_CASE("lockstep comparison is insensitive to halving dt") {
    const Mesh mesh = build_mesh(51, 1.0);
    const Nonlinearity nl = make_zero();
    const auto seeds = make_compare_seeds(mesh, 1, 2, 0.01, 1.0);
    const double sup_a =
        compare_trajectories(mesh, nl, 1e-3, seeds[0], 2e-3, 2.0, 0.01).sup_diff;
    const double sup_b =
        compare_trajectories(mesh, nl, 1e-3, seeds[0], 1e-3, 2.0, 0.01).sup_diff;
    REQUIRE(sup_b > 0.0);
    CHECK(std::abs(sup_a - sup_b) / sup_b < 0.01);
}

TEST_CASE("epsilon sweep: rate near one half and reduction consistency") {
    const Mesh mesh = build_mesh(101, 1.0);
    const Nonlinearity nl = make_zero();
    const std::vector<double> grid = {1e-1, 1e-2, 1e-3};
    const auto seeds = make_compare_seeds(mesh, 2, 1, 0.01, 1.0);

    const SweepResult sw = epsilon_sweep(mesh, nl, grid, seeds, 1e-3, 3.0, 0.01, 1);
    CHECK(sw.excluded.empty());
    CHECK(sw.rho >= 0.45);
    CHECK(sw.rho <= 0.55);
    CHECK(sw.max_log_residual < 0.1);

    REQUIRE(sw.D.size() == grid.size());
    REQUIRE(sw.D_seed.size() == grid.size());
    for (std::size_t e = 0; e < grid.size(); ++e) {
        // the reduction is the max over seeds of independently computed sups
        double worst = 0.0;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const double direct =
                compare_trajectories(mesh, nl, grid[e], seeds[s], 1e-3, 3.0, 0.01)
                    .sup_diff;
            CHECK(sw.D_seed[e][s] == direct);
            worst = std::max(worst, sw.D_seed[e][s]);
        }
        CHECK(sw.D[e] == worst);
        if (e > 0) CHECK(sw.D[e] < sw.D[e - 1]);
    }

    // thread count must not change a single bit of the result
    const SweepResult sw3 = epsilon_sweep(mesh, nl, grid, seeds, 1e-3, 3.0, 0.01, 3);
    CHECK(sw3.D == sw.D);
    CHECK(sw3.rho == sw.rho);

    // degenerate all-zero seeds give zero distances everywhere: no fit exists
    std::vector<CompareSeed> zeros(2);
    for (CompareSeed& z : zeros) {
        z.u0.assign(mesh.n, 0.0);
        z.v0.assign(mesh.n, 0.0);
    }
    CHECK_THROWS_AS(epsilon_sweep(mesh, nl, grid, zeros, 1e-3, 1.0, 0.1, 1),
                    std::runtime_error);
    CHECK_THROWS_AS(epsilon_sweep(mesh, nl, {1e-1}, seeds, 1e-3, 1.0, 0.1, 1),
                    std::invalid_argument);
}

TEST_CASE("upper semicontinuity: cloud distances shrink with eps") {
    const Mesh mesh = build_mesh(51, 1.0);
    const Nonlinearity nl = make_double_well(1.0);
    const std::vector<double> eps_list = {0.1, 0.01};
    const double burn = 20.0, window = 2.0, cadence = 1.0, dt = 2e-3;

    // seeds shifted into one potential well so that the perturbed and limit
    // flows settle on the same equilibrium branch
    std::vector<CompareSeed> seeds;
    for (const State& st : make_random_states(mesh, 2, 1, 1.0, 1.0)) {
        CompareSeed cs;
        cs.u0 = st.u;
        cs.v0 = st.v;
        cs.d0p = {0.0, 0.0};
        cs.d1p = {-st.v.front(), -st.v.back()};
        seeds.push_back(std::move(cs));
    }

    const SemicontinuityReport rep = upper_semicontinuity_report(
        mesh, nl, eps_list, seeds, burn, window, cadence, dt);

    REQUIRE(rep.eps_list == eps_list);
    REQUIRE(rep.dist.size() == 2);
    REQUIRE(rep.cloud_size.size() == 2);
    CHECK(rep.limit_cloud_size == 6);  // 2 seeds x samples {0,1,2}
    CHECK(rep.cloud_size[0] == 6);
    CHECK(rep.cloud_size[1] == 6);
    CHECK(rep.limit_max_norm > 0.0);

    // O(sqrt(eps)) collapse onto the lifted limit cloud
    CHECK(rep.dist[1] < rep.dist[0]);
    CHECK(rep.dist[0] >= 0.12);
    CHECK(rep.dist[0] <= 0.16);
    CHECK(rep.dist[1] >= 0.012);
    CHECK(rep.dist[1] <= 0.018);

    // consistency: the cloud distance is dominated by the per-seed lockstep
    // comparison sups over the same horizon, because matched sample times make
    // the cloud members a subset of the compared states
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        double worst = 0.0;
        for (const CompareSeed& s : seeds) {
            worst = std::max(worst,
                             compare_trajectories(mesh, nl, eps_list[e], s, dt,
                                                  burn + window, cadence)
                                 .sup_diff);
        }
        CHECK(rep.dist[e] <= worst + 1e-12);
    }
}

}  // TEST_SUITE
