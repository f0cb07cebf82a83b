#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "solwave/diagnostics.hpp"
#include "solwave/height_solver.hpp"

namespace solwave {

// Eulerian fields sampled on the image of the (r,s) grid: structured but
// non-rectangular in (x, y). Node layout matches HeightField (row-major i,j).
struct EulerianFields {
    std::shared_ptr<const LaminarProfile> profile;
    Grid grid;
    double F = 0.0;
    double Q = 0.0;       // Bernoulli constant, lambda + 2/F^2
    double P_atm = 0.0;

    std::vector<double> x;    // size nr+1
    std::vector<double> eta;  // surface elevation eta(x) = h(x,0)-1, size nr+1
    std::vector<double> y;    // node-major, h-1
    std::vector<double> u;    // absolute horizontal velocity, c_nd + (u-c)
    std::vector<double> v;
    std::vector<double> psi;  // = -s
    std::vector<double> P;    // filled by pressure_field

    int stride() const { return grid.ns + 1; }
    double at(const std::vector<double>& a, int i, int j) const {
        return a[i * stride() + j];
    }
};

// Change of variables (x,y) = (r, h-1), c-u = 1/h_s, v = -h_r/h_s. Surface
// velocities are closed with the dynamic boundary condition
// |grad psi|^2 = Q - (2/F^2) h so that P = P_atm holds there exactly.
EulerianFields to_eulerian(const HeightField& f, double F, double P_atm = 0.0);

// P = -(1/2)|grad psi|^2 - (1/F^2)(y+1) + Gamma(-psi) + Q/2 + P_atm.
void pressure_field(EulerianFields& fields);

struct BoundCheckReport {
    double pressure_bound_min = 0.0;   // min of P - P_atm + (1/2)||gamma+|| psi
    double velocity_bound_slack = 0.0; // RHS - max((u-c)^2+v^2)
    Flag flag = Flag::not_applicable;
};
BoundCheckReport bound_checks(const EulerianFields& fields, const LaminarProfile& p,
                              double F);

struct RoundtripReport {
    HeightField field;       // reconstructed h, stored as phi = h - H
    double error_sup = 0.0;  // sup |h_reconstructed - h_source|
    double tol_interp = 0.0; // a-priori interpolation/quadrature tolerance
};
// Rebuild psi by column integration of psi_y = u-c, invert y -> psi with a
// monotone cubic, and compare the recovered h against the source heights.
RoundtripReport roundtrip(const EulerianFields& fields);

// Max over nodes of |psi(column-integrated) + s| (weak Bernoulli shadow).
double psi_column_error(const EulerianFields& fields);

// Columnar export (x, y, u, v, psi, P) and surface file (x, eta); headers
// carry the unit-conversion record and run provenance.
void write_eulerian(const EulerianFields& fields, std::ostream& os);
void write_surface(const EulerianFields& fields, std::ostream& os);

}  // namespace solwave
