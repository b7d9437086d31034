#pragma once
// Energy bookkeeping along a trajectory and the verification tools built on
// it: the coupled Lyapunov functional, its differential inequality check, a
// three-parameter exponential decay fit, a discrete Gronwall-lemma verifier,
// absorbing set entry detection, and the boundary acceleration integral.

#include <optional>
#include <vector>

#include "wavebc/model.hpp"

namespace wavebc {

// One sampled row of the energy ledger. E_base is the dissipated energy
// (squared phase space norm plus twice the potential integral, plus the
// boundary displacement term in Robin mode). E_eps is the coupled Lyapunov
// functional (equal to E_base when no constants are attached).
// identity_residual is the largest per-step energy identity defect rate
// |E(t+dt) - E(t) + 2 dt D_mid| / dt over the steps since the previous row.
// utt_boundary_sq is |u_tt|^2 summed over the two boundary nodes, filled by
// finalize() from second differences of the recorded boundary trace.
struct LedgerRow {
    double t = 0.0;
    double E_base = 0.0;
    double E_eps = 0.0;
    double diss_interior = 0.0;   // ||v||^2 at the sample
    double diss_boundary = 0.0;   // |gamma|^2 (acoustic) or |v|_G^2 (transport, Robin)
    double identity_residual = 0.0;
    double utt_boundary_sq = 0.0;
    double norm_sq = 0.0;         // squared H_eps norm (kept in memory, not serialized)
};

struct EnergyLedger {
    const Mesh* mesh = nullptr;
    Nonlinearity nl;
    BcMode mode = BcMode::acoustic;
    const FunctionalConstants* fc = nullptr;  // optional; coupling weight 0 if absent

    std::vector<LedgerRow> rows;
    bool finalized = false;

    EnergyLedger() = default;
    EnergyLedger(const Mesh& m, const Nonlinearity& n, BcMode md,
                 const FunctionalConstants* c = nullptr)
        : mesh(&m), nl(n), mode(md), fc(c) {}

    // Append a row for the given state. max_residual_rate is the largest
    // per-step identity defect rate since the previous record call.
    void record(const State& st, double max_residual_rate);

    // Fill utt_boundary_sq from second differences of the boundary trace.
    // Requires at least three rows at uniform spacing.
    void finalize();

  private:
    std::vector<std::array<double, 2>> traces_;
};

// Dissipated energy of a state: norm_Heps_sq + 2 * potential integral, plus
// |u|_G^2 in Robin mode (whose dissipation identity needs it).
double energy_base(const Mesh& mesh, const Nonlinearity& nl, const State& st,
                   BcMode mode);

// Coupled Lyapunov functional:
//   E_base + 2 * eta1 * (u(0) delta(0) + u(L) delta(L))
// with eta1 from the constants (0 if fc is null). Along acoustic trajectories
// it obeys d/dt E_eps <= -m1 ||z||^2 + M1.
double lyapunov_E_eps(const Mesh& mesh, const Nonlinearity& nl,
                      const FunctionalConstants* fc, const State& st,
                      BcMode mode);

// Centered-difference check of the Lyapunov differential inequality on a
// finalized or plain ledger. Violation at row i is
//   (E_eps[i+1] - E_eps[i-1]) / (t[i+1] - t[i-1]) + m1 ||z_i||^2 - M1,
// and the check passes when every violation stays below tol.
struct DiffIneqReport {
    bool ok = false;
    double worst_violation = 0.0;  // largest violation over interior rows
    double worst_t = 0.0;
    int checked = 0;
};

DiffIneqReport check_diff_inequality(const EnergyLedger& ledger,
                                     const FunctionalConstants& fc, double tol);

// Least squares fit of y(t) ~ Q exp(-omega t) + P. P is the mean of the last
// tenth of the series; Q and omega come from a log-linear fit of y - P over
// the transient. flagged is set when no usable transient exists (constant
// series, fewer than four transient points, or a strongly non-monotone tail).
struct DecayFit {
    double Q = 0.0;
    double omega = 0.0;
    double P = 0.0;
    double rms_residual = 0.0;  // RMS misfit of log(y - P) over the transient
    bool flagged = false;
};

DecayFit fit_decay(const std::vector<double>& ts, const std::vector<double>& ys);

// Discrete Gronwall-lemma verifier. Given samples of Lambda(t) >= 0 and of
// the running coefficient integral H(t) = int_0^t eta_loc(s) ds satisfying
// d/dt Lambda <= -eta_loc Lambda + k, with the uniformity precondition
//   sup_t [ (H(t) - eta t) - min_{s <= t} (H(s) - eta s) ] <= m,
// every sample must obey Lambda(t) <= Lambda(0) e^m e^{-eta t} + k e^m / eta.
// pre_ok distinguishes a precondition failure from a bound violation.
struct GronwallReport {
    bool pre_ok = false;
    bool holds = false;
    double min_slack = 0.0;  // min over samples of bound(t) - Lambda(t)
};

GronwallReport verify_gronwall(const std::vector<double>& ts,
                               const std::vector<double>& lambda,
                               const std::vector<double>& h,
                               double eta, double k, double m);

// First sample time after which the squared norm stays within R1^2 for the
// rest of the ledger, compared against the theoretical entry bound t1. The
// comparison verdict is only decidable when entry is observed (or the run
// extends past t1, which for honest constants it rarely does).
struct AbsEntryReport {
    bool entered = false;
    double entry_time = 0.0;
    double t1 = 0.0;
    bool within_t1_decidable = false;
    bool within_t1 = false;
};

AbsEntryReport verify_abs_entry(const EnergyLedger& ledger,
                                const FunctionalConstants& fc, double R0);

// Eventual bound on the Lyapunov functional: after the entry time predicted
// by the differential inequality, E_eps must sit below
//   S_star = C2 * r1 * (1 + r1^3),  r1^2 = eta1 kappa_f / m_star + 1.
// Returns the first sample time after which that holds for the rest of the
// run, or no value if it never does.
struct EventBoundReport {
    double S_star = 0.0;
    double t1 = 0.0;
    std::optional<double> t_star;
};

EventBoundReport verify_event_bound(const EnergyLedger& ledger,
                                    const FunctionalConstants& fc, double R0);

// Trapezoid integral of the utt_boundary_sq column. Requires finalize().
double utt_boundary_integral(const EnergyLedger& ledger);

}  // namespace wavebc
