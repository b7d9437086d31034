#include "wavebc/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace wavebc {

void tridiag_apply(const SymTridiag& A, const Vec& x, Vec& y) {
    const std::size_t n = A.d.size();
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = A.d[i] * x[i];
        if (i > 0) s += A.e[i - 1] * x[i - 1];
        if (i + 1 < n) s += A.e[i] * x[i + 1];
        y[i] = s;
    }
}

double tridiag_quad(const SymTridiag& A, const Vec& x) {
    const std::size_t n = A.d.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += A.d[i] * x[i] * x[i];
    for (std::size_t i = 0; i + 1 < n; ++i) s += 2.0 * A.e[i] * x[i] * x[i + 1];
    return s;
}

void TridiagFactor::factor(const SymTridiag& A) {
    const std::size_t n = A.d.size();
    diag.resize(n);
    sub.resize(n > 0 ? n - 1 : 0);
    diag[0] = A.d[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (diag[i - 1] <= 0.0)
            throw std::runtime_error("TridiagFactor: matrix not positive definite");
        sub[i - 1] = A.e[i - 1] / diag[i - 1];
        diag[i] = A.d[i] - sub[i - 1] * A.e[i - 1];
    }
    if (diag[n - 1] <= 0.0)
        throw std::runtime_error("TridiagFactor: matrix not positive definite");
}

void TridiagFactor::solve(const Vec& b, Vec& x) const {
    const std::size_t n = diag.size();
    x.resize(n);
    // forward substitution with the unit lower bidiagonal factor
    x[0] = b[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = b[i] - sub[i - 1] * x[i - 1];
    // diagonal and transpose sweep
    x[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = x[i] / diag[i] - sub[i] * x[i + 1];
}

Mesh build_mesh(int n, double L) {
    if (n < 3) throw std::invalid_argument("build_mesh: need at least 3 nodes");
    if (!(L > 0.0)) throw std::invalid_argument("build_mesh: L must be positive");

    Mesh mesh;
    mesh.n = n;
    mesh.L = L;
    mesh.h = L / (n - 1);
    mesh.x.resize(n);
    for (int i = 0; i < n; ++i) mesh.x[i] = L * i / (n - 1);

    const double h = mesh.h;
    mesh.mass.d.assign(n, 2.0 * h / 3.0);
    mesh.mass.d.front() = h / 3.0;
    mesh.mass.d.back() = h / 3.0;
    mesh.mass.e.assign(n - 1, h / 6.0);

    mesh.stiff.d.assign(n, 2.0 / h);
    mesh.stiff.d.front() = 1.0 / h;
    mesh.stiff.d.back() = 1.0 / h;
    mesh.stiff.e.assign(n - 1, -1.0 / h);

    mesh.stiff_mass.d.resize(n);
    mesh.stiff_mass.e.resize(n - 1);
    for (int i = 0; i < n; ++i) mesh.stiff_mass.d[i] = mesh.stiff.d[i] + mesh.mass.d[i];
    for (int i = 0; i + 1 < n; ++i) mesh.stiff_mass.e[i] = mesh.stiff.e[i] + mesh.mass.e[i];

    mesh.lumped.assign(n, h);
    mesh.lumped.front() = h / 2.0;
    mesh.lumped.back() = h / 2.0;

    mesh.gamma_idx = {0, n - 1};
    mesh.normal_sign = {-1.0, 1.0};
    return mesh;
}

// The energy norms are accumulated element by element as sums of squares
// (per element, u K u = (du)^2 / h and u M u = h/6 (a^2 + b^2 + (a+b)^2)),
// which is algebraically identical to the assembled quadratic forms but free
// of the sign cancellation that would otherwise put a dt-independent roundoff
// floor under the per-step energy identity audit.
double h1_norm_sq(const Mesh& mesh, const Vec& u) {
    if ((int)u.size() != mesh.n)
        throw std::invalid_argument("h1_norm_sq: length mismatch");
    double s = 0.0;
    const double inv_h = 1.0 / mesh.h;
    const double h6 = mesh.h / 6.0;
    for (int i = 0; i + 1 < mesh.n; ++i) {
        const double du = u[i + 1] - u[i];
        const double sm = u[i] + u[i + 1];
        s += inv_h * du * du + h6 * (u[i] * u[i] + u[i + 1] * u[i + 1] + sm * sm);
    }
    return s;
}

double l2_norm_sq(const Mesh& mesh, const Vec& v) {
    if ((int)v.size() != mesh.n)
        throw std::invalid_argument("l2_norm_sq: length mismatch");
    double s = 0.0;
    const double h6 = mesh.h / 6.0;
    for (int i = 0; i + 1 < mesh.n; ++i) {
        const double sm = v[i] + v[i + 1];
        s += h6 * (v[i] * v[i] + v[i + 1] * v[i + 1] + sm * sm);
    }
    return s;
}

double poincare_lambda(const Mesh& mesh, double tol) {
    // Inverse iteration for the smallest eigenvalue of (K + B^T B) x = lambda M x.
    const int n = mesh.n;
    SymTridiag A = mesh.stiff;
    A.d.front() += 1.0;
    A.d.back() += 1.0;

    TridiagFactor fac;
    fac.factor(A);

    Vec x(n, 1.0), mx, y;
    double lambda = 0.0;
    for (int iter = 0; iter < 500; ++iter) {
        tridiag_apply(mesh.mass, x, mx);
        fac.solve(mx, y);
        double ynorm = std::sqrt(tridiag_quad(mesh.mass, y));
        for (int i = 0; i < n; ++i) y[i] /= ynorm;
        double next = tridiag_quad(A, y);  // Rayleigh quotient, y is M-normalized
        x.swap(y);
        if (iter > 0 && std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next))) {
            return next;
        }
        lambda = next;
    }
    throw std::runtime_error("poincare_lambda: inverse iteration did not converge");
}

double trace_constant(const Mesh& mesh) {
    // Largest eigenvalue of B^T B x = mu (K + M) x equals the largest
    // eigenvalue of the 2x2 Schur complement G = B (K + M)^-1 B^T.
    const int n = mesh.n;
    TridiagFactor fac;
    fac.factor(mesh.stiff_mass);

    Vec e0(n, 0.0), eL(n, 0.0), g0, gL;
    e0[0] = 1.0;
    eL[n - 1] = 1.0;
    fac.solve(e0, g0);
    fac.solve(eL, gL);

    const double g00 = g0[0];
    const double g01 = g0[n - 1];
    const double g11 = gL[n - 1];
    const double tr = g00 + g11;
    const double disc = std::sqrt((g00 - g11) * (g00 - g11) + 4.0 * g01 * g01);
    return 0.5 * (tr + disc);
}

double sup_embedding_sq(const Mesh& mesh) {
    const int n = mesh.n;
    TridiagFactor fac;
    fac.factor(mesh.stiff_mass);
    Vec e(n, 0.0), g;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        e.assign(n, 0.0);
        e[i] = 1.0;
        fac.solve(e, g);
        best = std::max(best, g[i]);
    }
    return best;
}

}  // namespace wavebc
