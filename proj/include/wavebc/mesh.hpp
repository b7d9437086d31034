#pragma once
// Uniform P1 finite element mesh on the interval [0, L], with the mass and
// stiffness matrices, trapezoid (lumped) weights, and the discrete constants
// of the energy framework (Robin-Poincare eigenvalue, boundary trace constant,
// sup-norm embedding constant).

#include <array>
#include <vector>

namespace wavebc {

using Vec = std::vector<double>;

// Symmetric tridiagonal matrix: main diagonal d (size n), superdiagonal e
// (size n-1). Used for the mass matrix, the stiffness matrix, and every
// linear system the integrator assembles.
struct SymTridiag {
    Vec d;
    Vec e;

    std::size_t size() const { return d.size(); }
};

// y = A x
void tridiag_apply(const SymTridiag& A, const Vec& x, Vec& y);

// x^T A x
double tridiag_quad(const SymTridiag& A, const Vec& x);

// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
// Factor once, solve many times.
struct TridiagFactor {
    Vec diag;  // D entries
    Vec sub;   // unit lower bidiagonal entries
    void factor(const SymTridiag& A);
    void solve(const Vec& b, Vec& x) const;
};

struct Mesh {
    int n = 0;        // number of nodes
    double L = 0.0;   // interval length
    double h = 0.0;   // uniform spacing L / (n - 1)
    Vec x;            // node coordinates

    SymTridiag mass;        // consistent P1 mass matrix M
    SymTridiag stiff;       // stiffness matrix K
    SymTridiag stiff_mass;  // K + M, the H^1 inner product matrix
    Vec lumped;             // trapezoid weights (h/2 at ends, h inside)

    std::array<int, 2> gamma_idx = {0, 0};        // boundary node indices
    std::array<double, 2> normal_sign = {-1.0, 1.0};  // outward normal direction
};

// Build a uniform mesh with n >= 3 nodes on [0, L], L > 0.
Mesh build_mesh(int n, double L);

// u^T (K + M) u, the squared H^1 norm of the nodal interpolant.
double h1_norm_sq(const Mesh& mesh, const Vec& u);

// v^T M v, the squared L^2 norm.
double l2_norm_sq(const Mesh& mesh, const Vec& v);

// Smallest eigenvalue of K + B^T B relative to M, where B^T B is the boundary
// identity. This is the discrete version of the Robin eigenvalue problem
// -u'' = lambda u, du/dn + u = 0, whose smallest eigenvalue for L = 1 solves
// tan(sqrt(lambda)/2) = 1/sqrt(lambda), approximately 1.7071.
double poincare_lambda(const Mesh& mesh, double tol = 1e-11);

// Largest constant C with |u(0)|^2 + |u(L)|^2 <= C ||u||_1^2 over nodal u,
// i.e. the largest eigenvalue of B^T B relative to K + M, computed exactly
// from the 2x2 boundary Schur complement B (K + M)^-1 B^T. For L = 1 the
// continuum value is coth(1/2), approximately 2.1640.
double trace_constant(const Mesh& mesh);

// Squared sup-norm embedding constant: max_i (K + M)^-1_ii, the discrete
// analogue of max_x G(x, x) for the Neumann Green function of -u'' + u.
// For L = 1 the continuum value is coth(1), approximately 1.3130.
double sup_embedding_sq(const Mesh& mesh);

}  // namespace wavebc
