#include "wavebc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavebc {

double energy_base(const Mesh& mesh, const Nonlinearity& nl, const State& st,
                   BcMode mode) {
    double e = norm_Heps_sq(mesh, st) + 2.0 * potential_integral(mesh, nl, st.u);
    if (mode == BcMode::robin) {
        // The Robin dissipation identity balances against |u|_G^2 as well.
        e += st.u.front() * st.u.front() + st.u.back() * st.u.back();
    }
    return e;
}

double lyapunov_E_eps(const Mesh& mesh, const Nonlinearity& nl,
                      const FunctionalConstants* fc, const State& st,
                      BcMode mode) {
    double e = energy_base(mesh, nl, st, mode);
    if (fc) {
        e += 2.0 * fc->eta1 *
             (st.u.front() * st.delta[0] + st.u.back() * st.delta[1]);
    }
    return e;
}

void EnergyLedger::record(const State& st, double max_residual_rate) {
    if (!mesh) throw std::logic_error("EnergyLedger: no mesh attached");
    LedgerRow row;
    row.t = st.t;
    row.E_base = energy_base(*mesh, nl, st, mode);
    row.E_eps = lyapunov_E_eps(*mesh, nl, fc, st, mode);
    row.diss_interior = l2_norm_sq(*mesh, st.v);
    if (mode == BcMode::acoustic) {
        row.diss_boundary = st.gamma[0] * st.gamma[0] + st.gamma[1] * st.gamma[1];
    } else {
        row.diss_boundary = st.v.front() * st.v.front() + st.v.back() * st.v.back();
    }
    row.identity_residual = max_residual_rate;
    row.norm_sq = norm_Heps_sq(*mesh, st);
    rows.push_back(row);
    traces_.push_back({st.u.front(), st.u.back()});
    finalized = false;
}

void EnergyLedger::finalize() {
    const std::size_t n = rows.size();
    if (n < 3) throw std::logic_error("EnergyLedger::finalize: need at least 3 rows");
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        if (i > 0 && i + 1 < n) {
            const double dtl = rows[i].t - rows[i - 1].t;
            const double dtr = rows[i + 1].t - rows[i].t;
            if (!(dtl > 0.0 && dtr > 0.0))
                throw std::logic_error("EnergyLedger::finalize: non-increasing times");
            for (int j = 0; j < 2; ++j) {
                const double sl = (traces_[i][j] - traces_[i - 1][j]) / dtl;
                const double sr = (traces_[i + 1][j] - traces_[i][j]) / dtr;
                const double utt = 2.0 * (sr - sl) / (dtl + dtr);
                acc += utt * utt;
            }
            rows[i].utt_boundary_sq = acc;
        }
    }
    // One-sided copies at the ends.
    rows[0].utt_boundary_sq = rows[1].utt_boundary_sq;
    rows[n - 1].utt_boundary_sq = rows[n - 2].utt_boundary_sq;
    finalized = true;
}

DiffIneqReport check_diff_inequality(const EnergyLedger& ledger,
                                     const FunctionalConstants& fc, double tol) {
    const auto& rows = ledger.rows;
    if (rows.size() < 3)
        throw std::invalid_argument("check_diff_inequality: need at least 3 rows");
    DiffIneqReport rep;
    bool first = true;
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
        const double span = rows[i + 1].t - rows[i - 1].t;
        const double dE = (rows[i + 1].E_eps - rows[i - 1].E_eps) / span;
        const double viol = dE + fc.m1 * rows[i].norm_sq - fc.M1;
        if (first || viol > rep.worst_violation) {
            rep.worst_violation = viol;
            rep.worst_t = rows[i].t;
            first = false;
        }
        ++rep.checked;
    }
    rep.ok = rep.worst_violation <= tol;
    return rep;
}

DecayFit fit_decay(const std::vector<double>& ts, const std::vector<double>& ys) {
    if (ts.size() != ys.size())
        throw std::invalid_argument("fit_decay: length mismatch");
    const std::size_t n = ts.size();
    DecayFit fit;
    if (n < 5) {
        fit.flagged = true;
        return fit;
    }

    // Plateau from the last tenth of the series.
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    double p = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) p += ys[i];
    p /= (double)tail;
    fit.P = p;

    const double drop = ys[0] - p;
    if (!(drop > 0.0)) {
        fit.flagged = true;  // constant or rising series: no transient to fit
        return fit;
    }

    // Strongly non-monotone tail: plateau not settled.
    double tmin = ys[n - tail], tmax = ys[n - tail];
    for (std::size_t i = n - tail; i < n; ++i) {
        tmin = std::min(tmin, ys[i]);
        tmax = std::max(tmax, ys[i]);
    }
    if (tmax - tmin > 0.25 * drop) fit.flagged = true;

    // Transient prefix: points still clearly above the plateau.
    const double floor = 1e-3 * drop;
    std::size_t m = 0;
    while (m < n && ys[m] - p > floor) ++m;
    if (m < 4) {
        fit.flagged = true;
        return fit;
    }

    double st = 0.0, sz = 0.0, stt = 0.0, stz = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double z = std::log(ys[i] - p);
        st += ts[i];
        sz += z;
        stt += ts[i] * ts[i];
        stz += ts[i] * z;
    }
    const double denom = (double)m * stt - st * st;
    if (!(std::abs(denom) > 0.0)) {
        fit.flagged = true;
        return fit;
    }
    const double slope = ((double)m * stz - st * sz) / denom;
    const double intercept = (sz - slope * st) / (double)m;
    fit.omega = -slope;
    fit.Q = std::exp(intercept);

    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = std::log(ys[i] - p) - (intercept + slope * ts[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / (double)m);
    return fit;
}

GronwallReport verify_gronwall(const std::vector<double>& ts,
                               const std::vector<double>& lambda,
                               const std::vector<double>& h,
                               double eta, double k, double m) {
    if (ts.size() != lambda.size() || ts.size() != h.size() || ts.empty())
        throw std::invalid_argument("verify_gronwall: bad series lengths");
    if (!(eta > 0.0)) throw std::invalid_argument("verify_gronwall: eta must be positive");

    GronwallReport rep;
    const double slack_tol = 1e-12 * (1.0 + std::abs(lambda[0]) + std::abs(k / eta));

    // Uniformity precondition on H(t) - eta t against its running minimum.
    rep.pre_ok = true;
    double runmin = h[0] - eta * ts[0];
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double g = h[i] - eta * ts[i];
        runmin = std::min(runmin, g);
        if (g - runmin > m + slack_tol) {
            rep.pre_ok = false;
            break;
        }
    }
    if (!rep.pre_ok) return rep;

    const double em = std::exp(m);
    bool first = true;
    rep.holds = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double bound =
            lambda[0] * em * std::exp(-eta * (ts[i] - ts[0])) + k * em / eta;
        const double slack = bound - lambda[i];
        if (first || slack < rep.min_slack) rep.min_slack = slack;
        first = false;
        if (slack < -slack_tol) rep.holds = false;
    }
    return rep;
}

AbsEntryReport verify_abs_entry(const EnergyLedger& ledger,
                                const FunctionalConstants& fc, double R0) {
    const auto& rows = ledger.rows;
    if (rows.empty()) throw std::invalid_argument("verify_abs_entry: empty ledger");
    AbsEntryReport rep;
    rep.t1 = t1_bound(fc, R0);

    const double r1sq = fc.R1 * fc.R1 * (1.0 + 1e-12);
    std::size_t entry = rows.size();
    for (std::size_t i = rows.size(); i-- > 0;) {
        if (rows[i].norm_sq <= r1sq)
            entry = i;
        else
            break;
    }
    if (entry < rows.size()) {
        rep.entered = true;
        rep.entry_time = rows[entry].t;
        rep.within_t1_decidable = true;
        rep.within_t1 = rep.entry_time <= rep.t1;
    } else if (rows.back().t > rep.t1) {
        rep.within_t1_decidable = true;
        rep.within_t1 = false;
    }
    return rep;
}

EventBoundReport verify_event_bound(const EnergyLedger& ledger,
                                    const FunctionalConstants& fc, double R0) {
    const auto& rows = ledger.rows;
    if (rows.empty()) throw std::invalid_argument("verify_event_bound: empty ledger");
    EventBoundReport rep;
    const double r1 = std::sqrt(fc.eta1 * fc.kappa_f / fc.m_star + 1.0);
    rep.S_star = fc.C2 * r1 * (1.0 + r1 * r1 * r1 + fc.kappa_f);
    rep.t1 = t1_bound(fc, R0);

    const double cap = rep.S_star * (1.0 + 1e-12);
    std::size_t entry = rows.size();
    for (std::size_t i = rows.size(); i-- > 0;) {
        if (rows[i].E_eps <= cap)
            entry = i;
        else
            break;
    }
    if (entry < rows.size()) rep.t_star = rows[entry].t;
    return rep;
}

double utt_boundary_integral(const EnergyLedger& ledger) {
    if (!ledger.finalized)
        throw std::logic_error("utt_boundary_integral: ledger not finalized");
    const auto& rows = ledger.rows;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        acc += 0.5 * (rows[i].utt_boundary_sq + rows[i + 1].utt_boundary_sq) *
               (rows[i + 1].t - rows[i].t);
    }
    return acc;
}

}  // namespace wavebc
