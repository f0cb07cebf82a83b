#pragma once

#include <iosfwd>
#include <vector>

#include "solwave/background_flow.hpp"

namespace solwave {

// Shooting record for the planar system a' = H_s^4 b, b' = -nu a in the
// travel-time variable t = int_{-1}^s 1/H_s; t0 = t(0).
struct ShootingState {
    double nu = 0.0;
    double t0 = 0.0;
    std::vector<double> t;  // cell-face images, size n_cells+1
    std::vector<double> a;  // a at faces, a[0] = 0
    std::vector<double> b;  // b at faces, b[0] = 1
    double a_end() const { return a.back(); }  // = Phi(0; nu) up to the IVP scale
    double b_end() const { return b.back(); }  // = Phi_s(0; nu)/H_s(0)^3, same scale
};

struct SpectrumReport {
    double mu = 0.0;
    std::vector<double> eigenvalues;     // nu_0 < nu_1 < ...
    std::vector<double> dirichlet_poles; // roots of a(t0; nu), ascending
    std::vector<std::pair<double, double>> brackets;  // final bisection brackets
    std::vector<double> eigenfunction_s;   // s-nodes for the nu_0 eigenfunction
    std::vector<double> eigenfunction;     // a-samples at those nodes
};

struct AuxiliaryPhiReport {
    double eps_a = 0.0;
    std::vector<double> phi;        // Phi-tilde at s-nodes
    std::vector<double> phi_s;      // derivative at s-nodes
    double min_phi = 0.0;
    double min_phi_s = 0.0;
    double boundary_value = 0.0;    // -Phi~_s(0)/H_s(0)^3 + (1/F^2) Phi~(0)
    bool positivity_ok = false;     // Phi~ > 0 and Phi~_s > 0 on (-1, 0]
    bool boundary_sign_ok = false;  // boundary_value < 0
};

// Phi(s) = (1/H_s(-1)^3) int_{-1}^s H_s^3 dt at the profile nodes
// (closed-form per cell). Phi(-1)=0, Phi_s(-1)=1.
std::vector<double> phi_ivp(const LaminarProfile& p);

// A(mu) = -Phi_s(0)/H_s(0)^3 + mu*Phi(0); sign change at mu_cr.
double a_of_mu(const LaminarProfile& p, double mu);

// Fixed-step RK4 shooting aligned to the cell-face images in t; steps_per_unit
// controls resolution (steps per unit t, >= 1 sub-step per cell).
ShootingState shoot(const LaminarProfile& p, double nu, int steps_per_unit = 2048);

// First k eigenvalues of the Robin problem at the given mu, bracketed between
// consecutive Dirichlet poles and bisected to 1e-10 relative.
SpectrumReport eigenvalues(const LaminarProfile& p, double mu, int k,
                           int steps_per_unit = 2048);

// Integrate the auxiliary problem (Phi~_s/H_s^3)_s + eps/F^2 Phi~ = 0 with
// Phi~(-1) = eps_a, Phi~_s(-1) = 1 and report the sign conditions.
AuxiliaryPhiReport auxiliary_phi(const LaminarProfile& p, double F, double eps_a);

// Largest eps_a in {1e-2, 1e-3, ...} for which both sign conditions hold.
AuxiliaryPhiReport auxiliary_phi_auto(const LaminarProfile& p, double F);

// Center-space eigenvector components: u1(s) = int_{-1}^s H_s^3 dt and
// u2(s) = u1(s)/H_s(s), sampled at the profile nodes.
struct CenterEigenvectors {
    std::vector<double> u1;
    std::vector<double> u2;
};
CenterEigenvectors center_eigenvectors(const LaminarProfile& p);

// Text table (j, nu_j, bracket_lo, bracket_hi).
void write_spectrum_table(const SpectrumReport& r, std::ostream& os);

}  // namespace solwave
