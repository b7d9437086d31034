#pragma once
// Problem data for the damped semilinear wave equation on [0, L] with an
// oscillator-type (acoustic) boundary condition at parameter eps, its eps = 0
// frictional limit, and a Robin variant: the state vector, the cubic
// nonlinearity family, the eps-weighted phase space norm, the projection and
// lift maps between the perturbed and limit phase spaces, and the derived
// constants of the dissipation framework (coupling weight, decay margin,
// absorbing radius, entry time bound).

#include <array>
#include <string>

#include "wavebc/mesh.hpp"

namespace wavebc {

// Boundary condition mode for the wave equation.
//   acoustic:  eps * delta_tt + delta_t + delta = -u_t,  du/dn = delta_t  (eps > 0)
//   transport: du/dn = -u_t                              (the eps = 0 limit)
//   robin:     du/dn + u + u_t = 0
enum class BcMode { acoustic, transport, robin };

const char* bc_mode_name(BcMode mode);

// Full state: interior displacement u and velocity v = u_t at the mesh nodes,
// boundary displacement delta and boundary velocity gamma = delta_t at the two
// boundary nodes. eps = 0 marks a limit-problem state whose delta/gamma slots
// are carried only for lifting; transport and Robin runs keep them at zero.
struct State {
    Vec u;
    Vec v;
    std::array<double, 2> delta = {0.0, 0.0};
    std::array<double, 2> gamma = {0.0, 0.0};
    double eps = 0.0;
    double t = 0.0;
};

State make_state(const Mesh& mesh, double eps = 0.0);

// Cubic nonlinearity family f(s) = a3 s^3 + a1 s + a0 together with the
// scalar constants the dissipation framework needs.
enum class NlKind { zero, double_well, cubic_poly };

struct Nonlinearity {
    NlKind kind = NlKind::zero;
    double a3 = 0.0;
    double a1 = 0.0;
    double a0 = 0.0;

    double ell = 0.0;      // second derivative growth: |f''(s)| <= ell (1 + |s|)
    double theta = 0.0;    // semi-monotonicity bound: f'(s) >= -theta for all s
    double mu0 = 1.0;      // coercivity margin in (0, 1]
    double kappa_f = 0.0;  // coercivity offset: F(s) >= -(1-mu0)/2 s^2 - kappa_f/(2L)
};

// Constructors fill the structural constants via derive_constants with L = 1;
// call derive_constants again for a different domain length.
Nonlinearity make_zero();
Nonlinearity make_double_well(double k);                       // f(s) = s^3 - 2 k s
Nonlinearity make_cubic_poly(double a3, double a1, double a0); // a3 > 0

// Fill (ell, theta, mu0, kappa_f) from the coefficients: ell from f'',
// theta = -min f', mu0 = 1/2 for the cubic kinds (any value in (0,1] works),
// and kappa_f = -2L min_s [F(s) + (1-mu0)/2 s^2] clamped at zero.
Nonlinearity derive_constants(const Nonlinearity& nl, double L = 1.0);

double f_eval(const Nonlinearity& nl, double s);
double F_eval(const Nonlinearity& nl, double s);       // antiderivative, F(0) = 0
double fprime_eval(const Nonlinearity& nl, double s);

// Trapezoid-weighted potential integral sum_i l_i F(u_i). Its gradient is the
// lumped force M_L f(u), which is what makes the discrete energy identity exact.
double potential_integral(const Mesh& mesh, const Nonlinearity& nl, const Vec& u);

// Squared norm of the eps-weighted phase space:
//   ||u||_1^2 + ||v||^2 + |delta|^2 + st.eps * |gamma|^2.
// At eps = 0 this is the limit-space norm plus the carried |delta|^2 slot.
double norm_Heps_sq(const Mesh& mesh, const State& st);

// Projection onto the limit phase space: keep (u, v), zero the boundary
// slots, set eps = 0.
State project(const State& st);

// Lift of a limit-space trajectory point into the eps phase space:
// delta = eps * u at the boundary, gamma = -v at the boundary.
State lift(const Vec& u, const Vec& v, double eps, double t = 0.0);

// Derived constants of the dissipation framework for a given mesh and
// nonlinearity (with its structural constants already filled). All follow
// from the coupling weight eta1 plus the discrete mesh constants;
// derivations are documented in model.cpp.
struct FunctionalConstants {
    double lambda1 = 0.0;    // Robin-Poincare eigenvalue of the mesh
    double trace_c = 0.0;    // boundary trace constant of the mesh
    double cinf_sq = 0.0;    // squared sup-norm embedding constant
    double mu0 = 0.0;
    double kappa_f = 0.0;
    double theta = 0.0;

    double eta1_formula = 0.0;  // raw admissible-interval endpoint
    double eta1 = 0.0;          // coupling weight actually used
    double m_star = 0.0;        // decay margin of the functional inequality
    double m1 = 0.0;            // = 2 * m_star
    double M1 = 0.0;            // = 2 * eta1 * kappa_f
    double C1 = 0.0;            // lower sandwich constant
    double C2 = 0.0;            // upper sandwich constant
    double R1 = 0.0;            // absorbing set radius
    double beta = 0.0;          // shift used by the split decomposition (= theta)
};

FunctionalConstants derive_functional_constants(const Mesh& mesh,
                                                const Nonlinearity& nl);

// Entry time bound into the radius R1 absorbing set for initial data of norm
// at most R0: every trajectory with ||z(0)|| <= R0 is inside the ball of
// radius R1 for all t >= t1_bound(fc, R0).
double t1_bound(const FunctionalConstants& fc, double R0);

}  // namespace wavebc
