#include "wavebc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavebc {

const char* bc_mode_name(BcMode mode) {
    switch (mode) {
        case BcMode::acoustic: return "acoustic";
        case BcMode::transport: return "transport";
        case BcMode::robin: return "robin";
    }
    return "?";
}

State make_state(const Mesh& mesh, double eps) {
    State st;
    st.u.assign(mesh.n, 0.0);
    st.v.assign(mesh.n, 0.0);
    st.eps = eps;
    return st;
}

namespace {

// Minimize g(s) = F(s) + (1 - mu0)/2 s^2 over the real line for a coercive
// cubic f (a3 > 0): coarse scan over the root bracket of g', then Newton
// polish on g' = 0 from the best scan point.
double coercivity_minimum(const Nonlinearity& nl, double mu0) {
    const double b = nl.a1 + (1.0 - mu0);  // g'(s) = a3 s^3 + b s + a0
    const double bound = 1.0 + std::max(std::abs(b), std::abs(nl.a0)) / nl.a3;
    const int m = 20001;
    double best_s = 0.0;
    double best_g = 0.0;
    auto g = [&](double s) {
        return F_eval(nl, s) + 0.5 * (1.0 - mu0) * s * s;
    };
    for (int i = 0; i < m; ++i) {
        const double s = -bound + 2.0 * bound * i / (m - 1);
        const double val = g(s);
        if (i == 0 || val < best_g) {
            best_g = val;
            best_s = s;
        }
    }
    // Newton on g'(s) = a3 s^3 + b s + a0 near the scan minimum.
    double s = best_s;
    for (int it = 0; it < 50; ++it) {
        const double gp = nl.a3 * s * s * s + b * s + nl.a0;
        const double gpp = 3.0 * nl.a3 * s * s + b;
        if (std::abs(gpp) < 1e-14) break;
        const double next = s - gp / gpp;
        if (std::abs(next - s) < 1e-14 * (1.0 + std::abs(s))) {
            s = next;
            break;
        }
        s = next;
    }
    return std::min(best_g, g(s));
}

}  // namespace

Nonlinearity derive_constants(const Nonlinearity& nl, double L) {
    if (!(L > 0.0)) throw std::invalid_argument("derive_constants: L must be positive");
    Nonlinearity out = nl;
    if (nl.kind == NlKind::zero) {
        out.ell = 0.0;
        out.theta = 0.0;
        out.mu0 = 1.0;
        out.kappa_f = 0.0;
        return out;
    }
    if (!(nl.a3 > 0.0))
        throw std::invalid_argument("derive_constants: cubic leading coefficient must be positive");
    out.ell = 6.0 * nl.a3;                    // |f''(s)| = 6 a3 |s| <= ell (1 + |s|)
    out.theta = std::max(0.0, -nl.a1);        // min f' = a1
    out.mu0 = 0.5;
    const double gmin = coercivity_minimum(out, out.mu0);
    out.kappa_f = std::max(0.0, -2.0 * L * gmin);
    return out;
}

Nonlinearity make_zero() {
    Nonlinearity nl;
    nl.kind = NlKind::zero;
    return derive_constants(nl, 1.0);
}

Nonlinearity make_double_well(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("make_double_well: k must be positive");
    Nonlinearity nl;
    nl.kind = NlKind::double_well;
    nl.a3 = 1.0;
    nl.a1 = -2.0 * k;
    return derive_constants(nl, 1.0);
}

Nonlinearity make_cubic_poly(double a3, double a1, double a0) {
    Nonlinearity nl;
    nl.kind = NlKind::cubic_poly;
    nl.a3 = a3;
    nl.a1 = a1;
    nl.a0 = a0;
    return derive_constants(nl, 1.0);
}

double f_eval(const Nonlinearity& nl, double s) {
    return (nl.a3 * s * s + nl.a1) * s + nl.a0;
}

double F_eval(const Nonlinearity& nl, double s) {
    return ((0.25 * nl.a3 * s * s + 0.5 * nl.a1) * s + nl.a0) * s;
}

double fprime_eval(const Nonlinearity& nl, double s) {
    return 3.0 * nl.a3 * s * s + nl.a1;
}

double potential_integral(const Mesh& mesh, const Nonlinearity& nl, const Vec& u) {
    if (nl.kind == NlKind::zero) return 0.0;
    double s = 0.0;
    for (int i = 0; i < mesh.n; ++i) s += mesh.lumped[i] * F_eval(nl, u[i]);
    return s;
}

double norm_Heps_sq(const Mesh& mesh, const State& st) {
    if ((int)st.u.size() != mesh.n || (int)st.v.size() != mesh.n)
        throw std::invalid_argument("norm_Heps_sq: state does not match mesh");
    const double bd = st.delta[0] * st.delta[0] + st.delta[1] * st.delta[1];
    const double bg = st.gamma[0] * st.gamma[0] + st.gamma[1] * st.gamma[1];
    return h1_norm_sq(mesh, st.u) + l2_norm_sq(mesh, st.v) + bd + st.eps * bg;
}

State project(const State& st) {
    State out = st;
    out.delta = {0.0, 0.0};
    out.gamma = {0.0, 0.0};
    out.eps = 0.0;
    return out;
}

State lift(const Vec& u, const Vec& v, double eps, double t) {
    State out;
    out.u = u;
    out.v = v;
    out.delta = {eps * u.front(), eps * u.back()};
    out.gamma = {-v.front(), -v.back()};
    out.eps = eps;
    out.t = t;
    return out;
}

// The coupled Lyapunov functional is
//   E(z) = ||z||^2 + 2 eta <u, delta>_G + 2 int F(u),
// and the constant chain below makes three facts quantitative:
//
// margin m_star: along trajectories dE/dt <= -2 m_star ||z||^2 + 2 eta kappa_f
//   provided eta is small enough. The admissible endpoint is
//   eta1_formula = min{mu0/(2+Cg), 3/4, 2/(3+2Cg)}; taking the endpoint
//   itself zeroes the first margin below, so the coupling used is half of it.
//   The four margins (coefficients of ||u||_1^2, ||v||^2, |delta|^2, eps
//   |gamma|^2 in -dE/dt after absorbing the cross terms) are
//     eta (mu0 - eta (2+Cg)),  3/4 - eta,  (eta/2)(1 - eta/2),  1 - eta (3/2+Cg).
//
// lower sandwich C1: with Young's inequality at weight 2 eta on the coupling
//   term and the coercivity bound 2 int F >= -(1-mu0) ||u||_1^2 - kappa_f
//   (exact discretely because the lumped mass is M + h^2/6 K <= K + M),
//   E >= (mu0 - 2 eta^2 Cg) ||u||_1^2 + ||v||^2 + (1/2)|delta|^2
//        + eps |gamma|^2 - kappa_f, so C1 = min{mu0 - 2 eta^2 Cg, 1/2}.
//
// upper sandwich C2: |2 eta <u,delta>_G| <= eta max(Cg,1) ||z||^2, and with
//   x = ||z||, sum_i l_i u_i^2 <= 3 ||u||_M^2, max u^2 <= Cinf^2 ||u||_1^2:
//   2 int F <= 6 c4 Cinf^2 x^4 + 6 c2 x^2 + 2 sqrt(3L) c1 x with
//   c4 = |a3|/4, c2 = |a1|/2, c1 = |a0|. Since x^2 <= x(1+x^3) for x >= 0,
//   C2 = 1 + eta max(Cg,1) + 6 c2 + 6 c4 Cinf^2 + 2 sqrt(3L) c1.
FunctionalConstants derive_functional_constants(const Mesh& mesh,
                                                const Nonlinearity& nl) {
    FunctionalConstants fc;
    fc.lambda1 = poincare_lambda(mesh);
    fc.trace_c = trace_constant(mesh);
    fc.cinf_sq = sup_embedding_sq(mesh);
    fc.mu0 = nl.mu0;
    fc.kappa_f = nl.kappa_f;
    fc.theta = nl.theta;
    fc.beta = nl.theta;

    if (!(fc.mu0 > 0.0 && fc.mu0 <= 1.0))
        throw std::invalid_argument("derive_functional_constants: mu0 must be in (0,1]");

    const double Cg = fc.trace_c;
    fc.eta1_formula = std::min({fc.mu0 / (2.0 + Cg), 0.75, 2.0 / (3.0 + 2.0 * Cg)});
    if (!(fc.eta1_formula > 0.0))
        throw std::runtime_error("derive_functional_constants: coupling interval empty");

    double eta = 0.5 * fc.eta1_formula;
    double m_star = 0.0, C1 = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
        const double ma = eta * (fc.mu0 - eta * (2.0 + Cg));
        const double mb = 0.75 - eta;
        const double mc = 0.5 * eta * (1.0 - 0.5 * eta);
        const double md = 1.0 - eta * (1.5 + Cg);
        m_star = std::min({ma, mb, mc, md});
        C1 = std::min(fc.mu0 - 2.0 * eta * eta * Cg, 0.5);
        if (m_star > 0.0 && C1 > 0.0) break;
        eta *= 0.5;
    }
    if (!(m_star > 0.0 && C1 > 0.0))
        throw std::runtime_error("derive_functional_constants: no positive margin found");

    fc.eta1 = eta;
    fc.m_star = m_star;
    fc.m1 = 2.0 * m_star;
    fc.M1 = 2.0 * eta * fc.kappa_f;
    fc.C1 = C1;

    const double c4 = std::abs(nl.a3) / 4.0;
    const double c2 = std::abs(nl.a1) / 2.0;
    const double c1 = std::abs(nl.a0);
    fc.C2 = 1.0 + eta * std::max(Cg, 1.0) + 6.0 * c2 + 6.0 * c4 * fc.cinf_sq +
            2.0 * std::sqrt(3.0 * mesh.L) * c1;

    const double r1 = std::sqrt(fc.eta1 * fc.kappa_f / fc.m_star + 1.0);
    const double s_star = fc.C2 * r1 * (1.0 + r1 * r1 * r1 + fc.kappa_f);
    fc.R1 = std::sqrt((s_star + fc.kappa_f) / fc.C1);
    return fc;
}

double t1_bound(const FunctionalConstants& fc, double R0) {
    // E(0) <= C2 R0 (1 + R0^3), E >= -kappa_f, and the differential
    // inequality with margin m1 then forces entry by (range of E) / m1.
    const double e0 = fc.C2 * R0 * (1.0 + R0 * R0 * R0);
    return (e0 + fc.kappa_f) / fc.m1;
}

}  // namespace wavebc
