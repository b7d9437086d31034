// Experiment driver: turns a parsed Config into artifacts on disk (CSV files
// plus a summary.txt) and an exit code. Every audited invariant contributes
// one [PASS]/[FAIL] line to the summary; the run exits nonzero iff any audit
// fails. All file output goes through the atomic writers and all numbers are
// printed with format_double, so a rerun with the same config is
// byte-identical.

#include "wavebc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebc/attractor.hpp"
#include "wavebc/config.hpp"
#include "wavebc/csvio.hpp"
#include "wavebc/diagnostics.hpp"
#include "wavebc/integrator.hpp"

namespace wavebc {
namespace {

namespace fs = std::filesystem;

std::string fmt(double x) { return format_double(x); }

// Accumulates the audit verdict: one line per audited invariant.
struct Audit {
    std::vector<std::string> lines;
    bool all_ok = true;

    void check(bool ok, const std::string& what) {
        lines.push_back(std::string(ok ? "[PASS] " : "[FAIL] ") + what);
        all_ok = all_ok && ok;
    }
    void note(const std::string& what) { lines.push_back("note: " + what); }
};

Nonlinearity config_nonlinearity(const Config& cfg) {
    Nonlinearity nl;
    switch (cfg.nl_kind) {
        case NlKind::zero: nl = make_zero(); break;
        case NlKind::double_well: nl = make_double_well(cfg.k); break;
        case NlKind::cubic_poly: nl = make_cubic_poly(cfg.a3, cfg.a1, cfg.a0); break;
    }
    return derive_constants(nl, cfg.L);
}

std::string nl_describe(const Config& cfg) {
    switch (cfg.nl_kind) {
        case NlKind::zero: return "zero";
        case NlKind::double_well: return "double_well(k=" + fmt(cfg.k) + ")";
        case NlKind::cubic_poly:
            return "cubic_poly(a3=" + fmt(cfg.a3) + ", a1=" + fmt(cfg.a1) +
                   ", a0=" + fmt(cfg.a0) + ")";
    }
    return "?";
}

// Fixed smooth state used by the energy audits: low cosine modes with
// nonzero boundary traces plus nonzero boundary-oscillator data, so every
// coupling term of the discrete identity is exercised.
State canonical_audit_state(const Mesh& mesh, BcMode mode, double eps) {
    State st = make_state(mesh, mode == BcMode::acoustic ? eps : 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < mesh.n; ++i) {
        const double x = mesh.x[i] / mesh.L;
        st.u[i] = 0.4 * std::cos(pi * x) + 0.1 * std::cos(2.0 * pi * x);
        st.v[i] = 0.3 * std::cos(2.0 * pi * x) - 0.2 * std::cos(pi * x);
    }
    if (mode == BcMode::acoustic) {
        st.delta = {0.2, -0.1};
        st.gamma = {0.1, 0.15};
    }
    return st;
}

const char* kLedgerHeader[] = {"t",
                               "E_base",
                               "E_eps",
                               "diss_interior",
                               "diss_boundary",
                               "identity_residual",
                               "utt_boundary_sq"};

void write_ledger_csv(const fs::path& path, const EnergyLedger& ledger) {
    CsvRow header(std::begin(kLedgerHeader), std::end(kLedgerHeader));
    std::vector<CsvRow> rows;
    rows.reserve(ledger.rows.size());
    for (const LedgerRow& r : ledger.rows) {
        rows.push_back({fmt(r.t), fmt(r.E_base), fmt(r.E_eps), fmt(r.diss_interior),
                        fmt(r.diss_boundary), fmt(r.identity_residual),
                        fmt(r.utt_boundary_sq)});
    }
    write_csv_atomic(path.string(), header, rows);
}

std::vector<std::string> summary_preamble(const Config& cfg) {
    std::vector<std::string> out;
    out.push_back(std::string("experiment: ") + experiment_name(cfg.experiment));
    out.push_back("mesh: n=" + std::to_string(cfg.n) + ", L=" + fmt(cfg.L));
    out.push_back("nonlinearity: " + nl_describe(cfg));
    out.push_back("time: dt=" + fmt(cfg.dt) + ", T=" + fmt(cfg.T) +
                  ", sample_dt=" + fmt(cfg.sample_dt));
    out.push_back("rng_seed=" + std::to_string(cfg.rng_seed) +
                  ", seeds=" + std::to_string(cfg.seeds));
    out.push_back(
        "convention: the boundary oscillator enters at first order in eps "
        "(eps*delta_tt + delta_t + delta = -u_t) and the phase-space norm "
        "weights the boundary velocity by eps; the quadratic-inertia variant "
        "(eps^2*delta_tt) is out of scope for this code.");
    out.push_back("");
    return out;
}

int finish(const fs::path& dir, std::vector<std::string>& out, const Audit& audit) {
    out.push_back("");
    for (const std::string& l : audit.lines) out.push_back(l);
    out.push_back("");
    out.push_back(audit.all_ok ? "verdict: PASS" : "verdict: FAIL");
    std::string text;
    for (const std::string& l : out) {
        text += l;
        text += '\n';
    }
    write_text_atomic((dir / "summary.txt").string(), text);
    return audit.all_ok ? exit_ok : exit_audit_failure;
}

// ---------------------------------------------------------------------------
// energy_audit and robin_demo: per-step energy identity residuals plus an
// optional dt-halving order study.

int run_energy_audit_like(const Config& cfg, const fs::path& dir, BcMode mode) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const State st0 = canonical_audit_state(mesh, mode, cfg.eps);

    auto audit_pass = [&](double dt, EnergyLedger* ledger_out) {
        Stepper stp = make_stepper(mesh, nl, mode, cfg.eps, dt);
        EnergyLedger ledger(mesh, nl, mode);
        run(stp, st0, cfg.T, cfg.sample_dt, &ledger);
        ledger.finalize();
        double worst = 0.0;
        for (const LedgerRow& r : ledger.rows)
            worst = std::max(worst, r.identity_residual);
        if (ledger_out) *ledger_out = std::move(ledger);
        return worst;
    };

    EnergyLedger ledger;
    const double max_resid = audit_pass(cfg.dt, &ledger);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back(std::string("mode: ") + bc_mode_name(mode) +
                  (mode == BcMode::acoustic ? ", eps=" + fmt(cfg.eps) : ""));
    out.push_back("E_base(0)=" + fmt(ledger.rows.front().E_base) +
                  ", E_base(T)=" + fmt(ledger.rows.back().E_base));
    out.push_back("max identity residual rate: " + fmt(max_resid));
    out.push_back("boundary acceleration integral: " +
                  fmt(utt_boundary_integral(ledger)));

    Audit audit;
    audit.check(max_resid <= cfg.residual_tol,
                "energy identity: max residual rate " + fmt(max_resid) +
                    " <= " + fmt(cfg.residual_tol));

    if (cfg.order_study) {
        const double max_half = audit_pass(cfg.dt / 2.0, nullptr);
        out.push_back("max identity residual rate at dt/2: " + fmt(max_half));
        // For configurations where the identity is exact (no nonlinearity),
        // both residuals sit at the rounding floor and the ratio is
        // meaningless noise; that outcome is stronger than second order.
        const double floor = 1e-10;
        if (max_resid <= floor && max_half <= floor) {
            audit.check(true,
                        "order study: residuals at the rounding floor at both dt "
                        "and dt/2 (identity exact for this configuration)");
        } else {
            const double ratio = max_resid / max_half;
            out.push_back("residual ratio dt vs dt/2: " + fmt(ratio) +
                          " (order estimate " + fmt(std::log2(ratio)) + ")");
            audit.check(ratio >= 3.5 && ratio <= 4.5,
                        "order study: residual ratio " + fmt(ratio) +
                            " in [3.5, 4.5]");
        }
    }

    write_ledger_csv(dir / "ledger.csv", ledger);
    return finish(dir, out, audit);
}

// ---------------------------------------------------------------------------
// absorbing_set: random initial data across an eps grid; verifies entry into
// the radius-R1 ball, eps-uniform entry times, the Lyapunov differential
// inequality (with a deliberately broken negative control), and the eventual
// bound on the functional.

int run_absorbing_set(const Config& cfg, const fs::path& dir) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const FunctionalConstants fc = derive_functional_constants(mesh, nl);
    const double R0 = cfg.seed_radius;
    const std::vector<State> states =
        make_random_states(mesh, cfg.seeds, cfg.rng_seed, R0);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back("constants: lambda1=" + fmt(fc.lambda1) + ", eta1=" + fmt(fc.eta1) +
                  ", m1=" + fmt(fc.m1) + ", M1=" + fmt(fc.M1));
    out.push_back("constants: C1=" + fmt(fc.C1) + ", C2=" + fmt(fc.C2) +
                  ", R1=" + fmt(fc.R1) + ", t1(R0=" + fmt(R0) + ")=" +
                  fmt(t1_bound(fc, R0)));
    out.push_back("initial data: " + std::to_string(cfg.seeds) +
                  " random states of norm " + fmt(R0) +
                  " at eps=1 (the eps-weighted norm at smaller eps is no larger)");
    out.push_back("");

    Audit audit;
    const double diff_tol = 10.0 * cfg.dt;
    double cadence_eff = cfg.sample_dt;
    std::vector<std::vector<double>> entry_times(states.size());
    std::vector<CsvRow> entry_rows;
    EnergyLedger first_ledger;

    for (std::size_t ie = 0; ie < cfg.eps_grid.size(); ++ie) {
        const double eps = cfg.eps_grid[ie];
        for (std::size_t is = 0; is < states.size(); ++is) {
            State st = states[is];
            st.eps = eps;
            Stepper stp = make_stepper(mesh, nl, BcMode::acoustic, eps, cfg.dt);
            EnergyLedger ledger(mesh, nl, BcMode::acoustic, &fc);
            run(stp, st, cfg.T, cfg.sample_dt, &ledger);
            ledger.finalize();
            if (ledger.rows.size() >= 2)
                cadence_eff = ledger.rows[1].t - ledger.rows[0].t;

            const std::string tag =
                "eps=" + fmt(eps) + " seed=" + std::to_string((int)is);
            const AbsEntryReport entry = verify_abs_entry(ledger, fc, R0);
            audit.check(entry.entered, "absorbing set: " + tag +
                                           " enters ||z|| <= R1 and remains "
                                           "(entry t=" +
                                           fmt(entry.entry_time) + ")");
            if (entry.entered) entry_times[is].push_back(entry.entry_time);

            const DiffIneqReport di = check_diff_inequality(ledger, fc, diff_tol);
            audit.check(di.ok, "differential inequality: " + tag +
                                   " worst violation " + fmt(di.worst_violation) +
                                   " <= " + fmt(diff_tol));

            const EventBoundReport ev = verify_event_bound(ledger, fc, R0);
            audit.check(ev.t_star.has_value(),
                        "eventual bound: " + tag + " E_eps <= S_star=" +
                            fmt(ev.S_star) + " from t=" +
                            fmt(ev.t_star.value_or(-1.0)) + " on");

            out.push_back(tag + ": entry=" + fmt(entry.entry_time) +
                          ", worst diff-ineq violation=" + fmt(di.worst_violation) +
                          ", t_star=" + fmt(ev.t_star.value_or(-1.0)) +
                          ", E_eps(T)=" + fmt(ledger.rows.back().E_eps));
            entry_rows.push_back({fmt(eps), std::to_string((int)is),
                                  fmt(entry.entry_time), fmt(entry.t1),
                                  fmt(di.worst_violation),
                                  fmt(ev.t_star.value_or(-1.0))});

            write_ledger_csv(dir / ("ledger_e" + std::to_string(ie) + "_s" +
                                    std::to_string(is) + ".csv"),
                             ledger);
            if (ie == 0 && is == 0) first_ledger = std::move(ledger);
        }
    }

    // Entry times must be eps-uniform: spread below the sampling cadence
    // plus 20 percent.
    for (std::size_t is = 0; is < states.size(); ++is) {
        if (entry_times[is].size() != cfg.eps_grid.size()) continue;
        const auto [mn, mx] =
            std::minmax_element(entry_times[is].begin(), entry_times[is].end());
        audit.check(*mx - *mn < 1.2 * cadence_eff,
                    "eps-uniformity: seed " + std::to_string((int)is) +
                        " entry time spread " + fmt(*mx - *mn) + " < " +
                        fmt(1.2 * cadence_eff));
    }

    // Negative control: a tenfold larger decay margin must break the
    // differential inequality, showing the check has teeth.
    FunctionalConstants fc_bad = fc;
    fc_bad.m1 *= 10.0;
    const DiffIneqReport bad = check_diff_inequality(first_ledger, fc_bad, diff_tol);
    audit.check(!bad.ok && bad.worst_violation > 0.0,
                "negative control: inflating m1 tenfold yields a positive "
                "violation (" +
                    fmt(bad.worst_violation) + ")");

    write_csv_atomic((dir / "entries.csv").string(),
                     {"eps", "seed", "entry_time", "t1", "worst_violation", "t_star"},
                     entry_rows);
    return finish(dir, out, audit);
}

// ---------------------------------------------------------------------------
// split_decay: two-part trajectory decomposition z = xi + chi; xi must decay
// exponentially, chi must stay bounded, and the parts must sum back to the
// full trajectory. The uniform-integrability gap of the dissipation integral
// is reported for two reference rates.

int run_split_decay(const Config& cfg, const fs::path& dir) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const FunctionalConstants fc = derive_functional_constants(mesh, nl);
    State z0 = make_random_states(mesh, 1, cfg.rng_seed, cfg.seed_radius)[0];
    z0.eps = cfg.eps;

    Stepper stp = make_stepper(mesh, nl, BcMode::acoustic, cfg.eps, cfg.dt);
    const SplitRun sr = run_split(stp, z0, cfg.T, cfg.sample_dt, fc.beta);

    double max_add = 0.0;
    for (double a : sr.additivity_err) max_add = std::max(max_add, a);
    const DecayFit fit = fit_decay(sr.ts, sr.norm_xi);

    const std::size_t mid = sr.norm_chi.size() / 2;
    double chi_first = 0.0, chi_second = 0.0;
    for (std::size_t i = 0; i < sr.norm_chi.size(); ++i)
        (i < mid ? chi_first : chi_second) =
            std::max(i < mid ? chi_first : chi_second, sr.norm_chi[i]);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back("eps=" + fmt(cfg.eps) + ", shift beta=" + fmt(fc.beta));
    out.push_back("decay fit of ||xi||: Q=" + fmt(fit.Q) + ", omega=" + fmt(fit.omega) +
                  ", P=" + fmt(fit.P) + ", rms log-residual=" + fmt(fit.rms_residual));
    out.push_back("max additivity error ||xi+chi-z||: " + fmt(max_add));
    out.push_back("max ||chi|| first half=" + fmt(chi_first) +
                  ", second half=" + fmt(chi_second));

    Audit audit;
    audit.check(max_add <= 1e-8,
                "additivity: max ||xi+chi-z|| " + fmt(max_add) + " <= 1e-08");
    audit.check(!fit.flagged && fit.omega > 0.0,
                "decaying part: fitted omega " + fmt(fit.omega) + " > 0");
    audit.check(chi_second <= 1.05 * chi_first + 1e-12,
                "bounded part: max ||chi|| over the second half " + fmt(chi_second) +
                    " <= 1.05 * first half " + fmt(chi_first));

    // Uniform integrability of the dissipation along the full trajectory:
    // with C(t) the cumulative dissipation integral and G(t) = C(t) - eta/2 t,
    // report sup_t [G(t) - min_{s<=t} G(s)] for two reference rates.
    {
        EnergyLedger ledger(mesh, nl, BcMode::acoustic, &fc);
        run(stp, z0, cfg.T, cfg.sample_dt, &ledger);
        std::vector<double> ts, cum;
        double c = 0.0;
        for (std::size_t i = 0; i < ledger.rows.size(); ++i) {
            const LedgerRow& r = ledger.rows[i];
            if (i > 0) {
                const LedgerRow& p = ledger.rows[i - 1];
                const double gi = 2.0 * (p.diss_interior + p.diss_boundary);
                const double gj = 2.0 * (r.diss_interior + r.diss_boundary);
                c += 0.5 * (gi + gj) * (r.t - p.t);
            }
            ts.push_back(r.t);
            cum.push_back(c);
        }
        for (double eta : {0.5, 0.1}) {
            double run_min = 0.0, gap = 0.0;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double g = cum[i] - 0.5 * eta * ts[i];
                run_min = std::min(run_min, g);
                gap = std::max(gap, g - run_min);
            }
            out.push_back("uniform-integrability gap at eta=" + fmt(eta) + ": " +
                          fmt(gap) + " (reported, not audited)");
        }
    }

    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < sr.ts.size(); ++i)
        rows.push_back({fmt(sr.ts[i]), fmt(sr.norm_xi[i]), fmt(sr.norm_chi[i]),
                        fmt(sr.additivity_err[i])});
    write_csv_atomic((dir / "split.csv").string(),
                     {"t", "norm_xi", "norm_chi", "additivity_err"}, rows);
    return finish(dir, out, audit);
}

// ---------------------------------------------------------------------------
// compare: lockstep distance between the eps trajectory and the lifted limit
// trajectory for each seed at a single eps.

std::vector<CompareSeed> config_compare_seeds(const Config& cfg, const Mesh& mesh) {
    std::vector<CompareSeed> seeds =
        make_compare_seeds(mesh, cfg.seeds, cfg.rng_seed, 0.01, 1.0);
    if (!cfg.boundary_data) {
        for (CompareSeed& s : seeds) {
            s.d0p = {0.0, 0.0};
            s.d1p = {0.0, 0.0};
        }
    }
    return seeds;
}

int run_compare(const Config& cfg, const fs::path& dir) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const std::vector<CompareSeed> seeds = config_compare_seeds(cfg, mesh);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back("eps=" + fmt(cfg.eps) + ", boundary data " +
                  (cfg.boundary_data ? "on" : "off"));

    Audit audit;
    std::vector<CompareResult> results;
    for (std::size_t is = 0; is < seeds.size(); ++is) {
        results.push_back(compare_trajectories(mesh, nl, cfg.eps, seeds[is], cfg.dt,
                                               cfg.T, cfg.sample_dt));
        out.push_back("seed " + std::to_string((int)is) +
                      ": sup ||z_eps - lift(z_0)|| = " +
                      fmt(results.back().sup_diff));
        audit.check(results.back().sup_diff > 0.0,
                    "non-degeneracy: seed " + std::to_string((int)is) +
                        " sup difference " + fmt(results.back().sup_diff) + " > 0");
    }

    CsvRow header = {"t"};
    for (std::size_t is = 0; is < seeds.size(); ++is)
        header.push_back("diff_seed" + std::to_string((int)is));
    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < results[0].ts.size(); ++i) {
        CsvRow row = {fmt(results[0].ts[i])};
        for (const CompareResult& r : results) row.push_back(fmt(r.diff[i]));
        rows.push_back(std::move(row));
    }
    write_csv_atomic((dir / "compare.csv").string(), header, rows);
    return finish(dir, out, audit);
}

// ---------------------------------------------------------------------------
// sweep: the closeness rate. D(eps) over the grid, power fit, monotonicity,
// and a dt-refinement check at the smallest eps.

int run_sweep(const Config& cfg, const fs::path& dir) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const std::vector<CompareSeed> seeds = config_compare_seeds(cfg, mesh);

    const SweepResult sw = epsilon_sweep(mesh, nl, cfg.eps_grid, seeds, cfg.dt,
                                         cfg.T, cfg.sample_dt, cfg.threads);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back("boundary data " + std::string(cfg.boundary_data ? "on" : "off"));
    out.push_back("fit: log D = rho * log eps + log M with rho=" + fmt(sw.rho) +
                  ", M=" + fmt(std::exp(sw.logC)) +
                  ", max |log residual|=" + fmt(sw.max_log_residual));

    Audit audit;
    auto excluded = [&](std::size_t i) {
        return std::find(sw.excluded.begin(), sw.excluded.end(), (int)i) !=
               sw.excluded.end();
    };
    for (std::size_t i = 0; i < sw.eps_grid.size(); ++i)
        out.push_back("eps=" + fmt(sw.eps_grid[i]) + ": D=" + fmt(sw.D[i]) +
                      (excluded(i) ? "  (excluded: zero distance)" : ""));
    if (!sw.excluded.empty())
        audit.note("warning: " + std::to_string(sw.excluded.size()) +
                   " grid point(s) had exactly zero distance and were excluded "
                   "from the fit");

    audit.check(sw.rho >= 0.45,
                "closeness rate: fitted rho " + fmt(sw.rho) + " >= 0.45");
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < sw.D.size(); ++i) {
        if (excluded(i) || excluded(i + 1)) continue;
        if (sw.D[i + 1] > sw.D[i] * (1.0 + 1e-9)) monotone = false;
    }
    audit.check(monotone,
                "monotonicity: D is nonincreasing along the decreasing eps grid");

    // dt refinement at the smallest eps: the measured distance must be a
    // property of the dynamics, not of the step size.
    {
        const double e = cfg.eps_grid.back();
        const CompareResult a = compare_trajectories(mesh, nl, e, seeds[0], cfg.dt,
                                                     cfg.T, cfg.sample_dt);
        const CompareResult b = compare_trajectories(mesh, nl, e, seeds[0],
                                                     cfg.dt / 2.0, cfg.T,
                                                     cfg.sample_dt);
        const double rel = std::abs(a.sup_diff - b.sup_diff) /
                           std::max(b.sup_diff, 1e-300);
        out.push_back("dt refinement at eps=" + fmt(e) + ": sup diff " +
                      fmt(a.sup_diff) + " (dt) vs " + fmt(b.sup_diff) +
                      " (dt/2), relative change " + fmt(rel));
        audit.check(rel < 0.01,
                    "dt convergence: relative change of D at dt/2 is " + fmt(rel) +
                        " < 0.01");
    }

    std::vector<CsvRow> rows;
    for (std::size_t i = 0; i < sw.eps_grid.size(); ++i)
        rows.push_back({fmt(sw.eps_grid[i]), fmt(sw.D[i]),
                        fmt(std::log(sw.eps_grid[i])),
                        fmt(sw.D[i] > 0.0 ? std::log(sw.D[i]) : 0.0)});
    write_csv_atomic((dir / "sweep.csv").string(),
                     {"eps", "D", "log_eps", "log_D"}, rows);
    return finish(dir, out, audit);
}

// ---------------------------------------------------------------------------
// omega_limit: late-time clouds of the eps dynamics against the lifted limit
// cloud. The Hausdorff semidistance must shrink with eps (double-well case),
// stay consistent with the lockstep comparison, and the cloud members must
// sit inside the absorbing ball.

int run_omega_limit(const Config& cfg, const fs::path& dir) {
    const Mesh mesh = build_mesh(cfg.n, cfg.L);
    const Nonlinearity nl = config_nonlinearity(cfg);
    const FunctionalConstants fc = derive_functional_constants(mesh, nl);

    // Generic random seeds; the boundary velocity is matched to the lift so
    // the transient, not the data, decides where each trajectory settles.
    std::vector<CompareSeed> seeds;
    for (const State& st :
         make_random_states(mesh, cfg.seeds, cfg.rng_seed, cfg.seed_radius)) {
        CompareSeed s;
        s.u0 = st.u;
        s.v0 = st.v;
        s.d0p = {0.0, 0.0};
        s.d1p = {-st.v.front(), -st.v.back()};
        seeds.push_back(std::move(s));
    }

    const SemicontinuityReport rep = upper_semicontinuity_report(
        mesh, nl, cfg.eps_grid, seeds, cfg.burn_in, cfg.window, cfg.cadence, cfg.dt);

    std::vector<std::string> out = summary_preamble(cfg);
    out.push_back("burn_in=" + fmt(cfg.burn_in) + ", window=" + fmt(cfg.window) +
                  ", cadence=" + fmt(cfg.cadence));
    out.push_back("limit cloud: " + std::to_string(rep.limit_cloud_size) +
                  " members, max norm " + fmt(rep.limit_max_norm));

    Audit audit;
    const double horizon = cfg.burn_in + cfg.window;
    std::vector<CsvRow> rows;
    std::vector<double> max_sup(rep.eps_list.size(), 0.0);
    for (std::size_t e = 0; e < rep.eps_list.size(); ++e) {
        const double eps = rep.eps_list[e];
        for (const CompareSeed& s : seeds) {
            const CompareResult cr = compare_trajectories(mesh, nl, eps, s, cfg.dt,
                                                          horizon, cfg.cadence);
            max_sup[e] = std::max(max_sup[e], cr.sup_diff);
        }
        out.push_back("eps=" + fmt(eps) + ": dist=" + fmt(rep.dist[e]) +
                      ", cloud size=" + std::to_string(rep.cloud_size[e]) +
                      ", max member norm=" + fmt(rep.max_member_norm[e]) +
                      ", max compare sup=" + fmt(max_sup[e]));
        rows.push_back({fmt(eps), std::to_string(rep.cloud_size[e]),
                        fmt(rep.max_member_norm[e]), fmt(rep.dist[e]),
                        fmt(max_sup[e])});

        audit.check(rep.max_member_norm[e] <= fc.R1 * 1.01,
                    "absorbing ball: eps=" + fmt(eps) + " max member norm " +
                        fmt(rep.max_member_norm[e]) + " <= R1=" + fmt(fc.R1));
        audit.check(rep.dist[e] <= max_sup[e] + 1e-12,
                    "consistency: eps=" + fmt(eps) + " cloud distance " +
                        fmt(rep.dist[e]) + " <= max lockstep sup " +
                        fmt(max_sup[e]));
    }

    if (cfg.nl_kind == NlKind::double_well) {
        bool decreasing = true;
        for (std::size_t e = 0; e + 1 < rep.dist.size(); ++e)
            if (!(rep.dist[e + 1] < rep.dist[e])) decreasing = false;
        audit.check(decreasing,
                    "semicontinuity: cloud distance decreases along the "
                    "decreasing eps grid");
    } else {
        audit.note("cloud distances reported without a decrease audit for this "
                   "nonlinearity (all trajectories collapse to the origin)");
    }

    write_csv_atomic((dir / "cloud_summary.csv").string(),
                     {"eps", "cloud_size", "max_member_norm", "dist",
                      "max_compare_sup"},
                     rows);
    return finish(dir, out, audit);
}

}  // namespace

int run_experiment(const Config& cfg, const std::string& output_dir) {
    const fs::path dir(output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" + output_dir +
                                 "': " + (ec ? ec.message() : "not a directory"));

    switch (cfg.experiment) {
        case Experiment::energy_audit:
            return run_energy_audit_like(cfg, dir, cfg.mode);
        case Experiment::robin_demo:
            return run_energy_audit_like(cfg, dir, BcMode::robin);
        case Experiment::absorbing_set:
            return run_absorbing_set(cfg, dir);
        case Experiment::split_decay:
            return run_split_decay(cfg, dir);
        case Experiment::compare:
            return run_compare(cfg, dir);
        case Experiment::sweep:
            return run_sweep(cfg, dir);
        case Experiment::omega_limit:
            return run_omega_limit(cfg, dir);
    }
    throw std::logic_error("unhandled experiment");
}

}  // namespace wavebc
