#pragma once

#include <iosfwd>
#include <vector>

#include "solwave/errors.hpp"

namespace solwave {

// Dimensional background data: relative shear U*(y) on [-d, 0] given as a
// piecewise-linear function by breakpoints. Kinks in U* carry the
// discontinuous vorticity.
struct Breakpoint {
    double y;  // vertical position, -d <= y <= 0
    double u;  // relative velocity sample, > 0
};

struct BackgroundCurrent {
    double depth = 1.0;       // d > 0
    double gravity = 1.0;     // g > 0
    double wave_speed = 1.0;  // c > 0
    std::vector<Breakpoint> shear;

    // Throws ConfigError / StagnantBackgroundError on an inadmissible input.
    void validate() const;
};

// Non-dimensional laminar state on s in [-1, 0]. Nodes are cell faces; every
// image of a U*-kink lands exactly on a face, so Gamma is exactly linear in s
// inside each cell and all family quadratures below are closed-form.
struct LaminarProfile {
    std::vector<double> s;      // nodes, size n+1, s[0] = -1, s[n] = 0
    std::vector<double> H;      // laminar height at nodes, H[0]=0, H[n]=1
    std::vector<double> Hs;     // dH/ds at nodes, > 0
    std::vector<double> Gamma;  // vorticity primitive at nodes, Gamma[n] = 0
    std::vector<double> gamma;  // a.e. derivative of Gamma, constant per cell
    std::vector<int> jump_faces;  // interior node indices where gamma jumps

    double lambda = 1.0;     // 1/H_s(0)^2
    double Gamma_min = 0.0;  // min Gamma over [-1,0] (attained at a node)
    double mu_cr = 1.0;      // (int H_s^3 ds)^{-1}

    // Unit-conversion record (lengths scale by depth, velocities by
    // vel_scale = (int U* dy)/d, pressures by rho*vel_scale^2).
    double depth = 1.0;
    double gravity = 1.0;
    double vel_scale = 1.0;
    double c_nd = 1.0;  // dimensionless wave speed c/vel_scale

    int n_cells() const { return static_cast<int>(gamma.size()); }
    double ds(int j) const { return s[j + 1] - s[j]; }
    double gamma_mid(int j) const { return 0.5 * (Gamma[j] + Gamma[j + 1]); }
    // sup of the positive part of gamma (used by the pressure bound)
    double gamma_plus_sup() const;

    // Exact integral of (kappa + 2*Gamma(t))^q over cell j. Gamma is linear in
    // t on the cell, so the primitive is (kappa+2*Gamma)^{q+1}/(2*gamma*(q+1)).
    double cell_int_pow(double kappa, double q, int j) const;
    // Same over all of [-1, 0].
    double int_pow(double kappa, double q) const;

    // Throws OutOfFamilyError unless kappa + 2*Gamma > 0 on all of [-1,0].
    void require_in_family(double kappa) const;
};

// Non-dimensionalize and build the laminar profile with ~n_s cells.
// Throws StagnantBackgroundError / ResolutionError per the type contracts.
LaminarProfile build_profile(const BackgroundCurrent& current, int n_s);

// H(s; kappa) = int_{-1}^s (kappa + 2*Gamma)^{-1/2} dt, exact quadrature.
double laminar_height(const LaminarProfile& p, double kappa, double s);

// H(s_j; kappa) at every node in one sweep.
std::vector<double> laminar_height_nodes(const LaminarProfile& p, double kappa);

// mu(kappa) = (kappa - lambda) / (2*(1 - H(0;kappa))), continuous at lambda.
double mu_of_kappa(const LaminarProfile& p, double kappa);

struct CriticalFroude {
    double mu_cr;
    double F_cr;
};
CriticalFroude critical_froude(const LaminarProfile& p);

// Inverse of the strictly decreasing map kappa -> H(0;kappa), to 1e-10.
double kappa_of_surface_height(const LaminarProfile& p, double h0);

// Columnar text table (s, H, H_s, Gamma, gamma) for inspection/plotting.
void write_profile_table(const LaminarProfile& p, std::ostream& os);

}  // namespace solwave
