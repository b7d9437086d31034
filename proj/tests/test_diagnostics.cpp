#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "wavebc/diagnostics.hpp"
#include "wavebc/integrator.hpp"
#include "wavebc/mesh.hpp"
#include "wavebc/model.hpp"

using namespace wavebc;

namespace {

// Ledger whose rows carry only the fields a verifier reads.
EnergyLedger synthetic_ledger(const std::vector<double>& ts,
                              const std::vector<double>& e_eps,
                              const std::vector<double>& norm_sq) {
    EnergyLedger led;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        LedgerRow row;
        row.t = ts[i];
        row.E_eps = e_eps[i];
        row.norm_sq = norm_sq[i];
        led.rows.push_back(row);
    }
    return led;
}

FunctionalConstants hand_constants() {
    FunctionalConstants fc;
    fc.eta1 = 1.0;
    fc.m_star = 1.0;
    fc.m1 = 1.0;
    fc.M1 = 1.0;
    fc.C1 = 0.5;
    fc.C2 = 1.0;
    fc.R1 = 2.0;
    fc.kappa_f = 0.0;
    return fc;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("fit_decay recovers a clean exponential-plus-plateau") {
    std::vector<double> ts, ys;
    for (double t = 0.0; t <= 40.0 + 1e-12; t += 0.1) {
        ts.push_back(t);
        ys.push_back(5.0 * std::exp(-0.3 * t) + 2.0);
    }
    const DecayFit fit = fit_decay(ts, ys);
    CHECK(!fit.flagged);
    CHECK(fit.Q == doctest::Approx(5.0).epsilon(0.02));
    CHECK(fit.omega == doctest::Approx(0.3).epsilon(0.02));
    CHECK(fit.P == doctest::Approx(2.0).epsilon(0.02));
    CHECK(fit.rms_residual < 0.1);

    // scale equivariance: 7 y(t) fits with 7Q, same omega, 7P
    std::vector<double> ys7 = ys;
    for (double& y : ys7) y *= 7.0;
    const DecayFit fit7 = fit_decay(ts, ys7);
    CHECK(fit7.omega == doctest::Approx(fit.omega).epsilon(1e-12));
    CHECK(fit7.Q == doctest::Approx(7.0 * fit.Q).epsilon(1e-12));
    CHECK(fit7.P == doctest::Approx(7.0 * fit.P).epsilon(1e-12));
}

TEST_CASE("fit_decay flags series without a usable transient") {
    std::vector<double> ts, ys;
    for (double t = 0.0; t <= 10.0; t += 0.5) {
        ts.push_back(t);
        ys.push_back(3.0);
    }
    DecayFit fit = fit_decay(ts, ys);
    CHECK(fit.flagged);
    CHECK(fit.P == doctest::Approx(3.0).epsilon(1e-12));

    // one point above the plateau is too short a transient
    ys[0] = 5.0;
    fit = fit_decay(ts, ys);
    CHECK(fit.flagged);
    CHECK(fit.Q == 0.0);

    CHECK(fit_decay({0.0, 1.0, 2.0}, {3.0, 2.0, 1.0}).flagged);  // n < 5
    CHECK_THROWS_AS(fit_decay({0.0, 1.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("Gronwall verifier accepts the closed-form borderline solution") {
    // dL/dt = -a L + k with constant rate: L(t) = (L0 - k/a) e^{-a t} + k/a.
    const double a = 0.6, k = 0.3, L0 = 2.0;
    std::vector<double> ts, lam, h;
    for (double t = 0.0; t <= 40.0 + 1e-12; t += 0.01) {
        ts.push_back(t);
        lam.push_back((L0 - k / a) * std::exp(-a * t) + k / a);
        h.push_back(a * t);
    }
    const GronwallReport rep = verify_gronwall(ts, lam, h, a, k, 0.0);
    CHECK(rep.pre_ok);
    CHECK(rep.holds);
    // the bound is asymptotically sharp: the slack decays to (almost) zero
    CHECK(rep.min_slack > 0.0);
    CHECK(rep.min_slack < 1e-9);
}

TEST_CASE("Gronwall verifier: strict decay, growth, and precondition failure") {
    const double eta = 0.5;
    std::vector<double> ts, decay, grow, zero, h_ok, h_bad;
    for (double t = 0.0; t <= 20.0 + 1e-12; t += 0.05) {
        ts.push_back(t);
        decay.push_back(3.0 * std::exp(-2.0 * eta * t));
        grow.push_back(std::exp(t));
        zero.push_back(0.0);
        h_ok.push_back(eta * t);
        h_bad.push_back(2.0 * eta * t);
    }

    // at t = 0 the bound equals Lambda(0) exactly, so the minimum slack is 0
    const GronwallReport strict = verify_gronwall(ts, decay, h_ok, eta, 0.0, 0.0);
    CHECK(strict.pre_ok);
    CHECK(strict.holds);
    CHECK(strict.min_slack == doctest::Approx(0.0).epsilon(1e-12));

    GronwallReport rep = verify_gronwall(ts, grow, h_ok, eta, 0.0, 0.0);
    CHECK(rep.pre_ok);
    CHECK(!rep.holds);
    CHECK(rep.min_slack < 0.0);

    // H grows twice as fast as eta t: run-up exceeds m -> precondition fails,
    // which is reported distinctly from a bound violation.
    rep = verify_gronwall(ts, zero, h_bad, eta, 0.0, 0.1);
    CHECK(!rep.pre_ok);
    CHECK(!rep.holds);

    // monotone in the source term: larger k can only loosen the bound
    const GronwallReport weak = verify_gronwall(ts, decay, h_ok, eta, 1.0, 0.0);
    CHECK(weak.holds);
    CHECK(weak.min_slack >= strict.min_slack);

    CHECK_THROWS_AS(verify_gronwall({}, {}, {}, eta, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(verify_gronwall(ts, decay, h_ok, 0.0, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(verify_gronwall(ts, decay, {1.0}, eta, 0.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("differential inequality check on synthetic ledgers") {
    const FunctionalConstants fc = hand_constants();

    std::vector<double> ts, e, nsq;
    for (double t = 0.0; t <= 2.0 + 1e-12; t += 0.1) {
        ts.push_back(t);
        e.push_back(5.0 * std::exp(-t));
        nsq.push_back(2.5 * std::exp(-t));
    }
    // dE/dt + m1 |z|^2 - M1 = -5e^-t + 2.5e^-t - 1 < 0 everywhere
    const EnergyLedger good = synthetic_ledger(ts, e, nsq);
    DiffIneqReport rep = check_diff_inequality(good, fc, 1e-2);
    CHECK(rep.ok);
    CHECK(rep.worst_violation < 0.0);
    CHECK(rep.checked == (int)ts.size() - 2);

    // constant energy with large norm violates by exactly m1*5 - M1 = 4
    const EnergyLedger bad = synthetic_ledger(
        ts, std::vector<double>(ts.size(), 5.0), std::vector<double>(ts.size(), 5.0));
    rep = check_diff_inequality(bad, fc, 1e-2);
    CHECK(!rep.ok);
    CHECK(rep.worst_violation == doctest::Approx(4.0).epsilon(1e-12));

    CHECK_THROWS_AS(
        check_diff_inequality(synthetic_ledger({0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}),
                              fc, 1.0),
        std::invalid_argument);
}

TEST_CASE("absorbing set entry detection on synthetic ledgers") {
    const FunctionalConstants fc = hand_constants();  // R1 = 2, m1 = 1
    const std::vector<double> ts = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const std::vector<double> nsq = {9.0, 5.0, 3.9, 4.2, 3.5, 3.0, 2.0};
    const std::vector<double> e(ts.size(), 1.0);

    // last excursion above R1^2 = 4 ends at t = 3, so entry is at t = 4
    AbsEntryReport rep = verify_abs_entry(synthetic_ledger(ts, e, nsq), fc, 3.0);
    CHECK(rep.entered);
    CHECK(rep.entry_time == 4.0);
    CHECK(rep.t1 == doctest::Approx(3.0 * (1.0 + 27.0)).epsilon(1e-12));  // R0 + R0^4
    CHECK(rep.within_t1_decidable);
    CHECK(rep.within_t1);

    // already inside from the start
    rep = verify_abs_entry(
        synthetic_ledger(ts, e, std::vector<double>(ts.size(), 1.0)), fc, 3.0);
    CHECK(rep.entered);
    CHECK(rep.entry_time == 0.0);

    // never inside, but the run extends past t1: decidably outside
    FunctionalConstants tiny = fc;
    tiny.R1 = 1e-6;
    rep = verify_abs_entry(synthetic_ledger(ts, e, nsq), tiny, 1.0);
    CHECK(!rep.entered);
    CHECK(rep.t1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.within_t1_decidable);
    CHECK(!rep.within_t1);

    CHECK_THROWS_AS(verify_abs_entry(EnergyLedger{}, fc, 1.0), std::invalid_argument);
}

TEST_CASE("eventual bound detection on synthetic ledgers") {
    const FunctionalConstants fc = hand_constants();
    // r1 = sqrt(eta1 kappa_f / m_star + 1) = 1, S_star = C2 * 1 * (1 + 1 + 0) = 2
    const std::vector<double> ts = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
    const std::vector<double> e = {9.0, 6.0, 3.0, 2.5, 1.9, 1.5, 1.2};
    const std::vector<double> nsq(ts.size(), 1.0);

    EventBoundReport rep = verify_event_bound(synthetic_ledger(ts, e, nsq), fc, 1.0);
    CHECK(rep.S_star == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(rep.t_star.has_value());
    CHECK(*rep.t_star == 4.0);

    rep = verify_event_bound(
        synthetic_ledger(ts, std::vector<double>(ts.size(), 9.0), nsq), fc, 1.0);
    CHECK(!rep.t_star.has_value());

    CHECK_THROWS_AS(verify_event_bound(EnergyLedger{}, fc, 1.0), std::invalid_argument);
}

TEST_CASE("ledger records energies and the boundary acceleration column") {
    const Mesh mesh = build_mesh(5, 1.0);
    const Nonlinearity nl = make_zero();
    EnergyLedger led(mesh, nl, BcMode::transport);

    // u(t) = c t^2 at every node: the second difference of the boundary trace
    // is exactly 2c at every interior row, so utt_boundary_sq = 8 c^2.
    const double c = 0.7, T = 2.0;
    for (double t = 0.0; t <= T + 1e-12; t += 0.1) {
        State st = make_state(mesh, 0.0);
        st.t = t;
        st.u.assign(mesh.n, c * t * t);
        st.v.assign(mesh.n, 2.0 * c * t);
        led.record(st, 0.0);
    }
    REQUIRE(led.rows.size() == 21);

    // recorded columns match the standalone energy evaluations
    for (const LedgerRow& row : led.rows) {
        State st = make_state(mesh, 0.0);
        st.u.assign(mesh.n, c * row.t * row.t);
        st.v.assign(mesh.n, 2.0 * c * row.t);
        CHECK(row.E_base ==
              doctest::Approx(energy_base(mesh, nl, st, BcMode::transport))
                  .epsilon(1e-12));
        CHECK(row.E_eps == row.E_base);  // no constants attached
        CHECK(row.norm_sq == doctest::Approx(norm_Heps_sq(mesh, st)).epsilon(1e-12));
        CHECK(row.diss_boundary ==
              doctest::Approx(2.0 * st.v[0] * st.v[0]).epsilon(1e-12));
    }

    CHECK_THROWS_AS(utt_boundary_integral(led), std::logic_error);
    led.finalize();
    const double utt = 8.0 * c * c;
    for (const LedgerRow& row : led.rows)
        CHECK(row.utt_boundary_sq == doctest::Approx(utt).epsilon(1e-9));
    CHECK(utt_boundary_integral(led) == doctest::Approx(utt * T).epsilon(1e-10));

    EnergyLedger two(mesh, nl, BcMode::transport);
    State st = make_state(mesh, 0.0);
    two.record(st, 0.0);
    two.record(st, 0.0);
    CHECK_THROWS_AS(two.finalize(), std::logic_error);
}

}  // TEST_SUITE
