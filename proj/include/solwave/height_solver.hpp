#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <vector>

#include "solwave/background_flow.hpp"

namespace solwave {

// Tensor grid on the truncated half strip [0, L] x [-1, 0]. The s-nodes are
// the LaminarProfile nodes (faces aligned to every gamma jump); r-nodes are
// uniform.
struct Grid {
    double L = 0.0;
    int nr = 0;  // r-cells; nodes 0..nr
    int ns = 0;  // s-cells; nodes 0..ns (== profile cells)
    std::vector<double> r;  // size nr+1, r[0] = 0, r[nr] = L

    static Grid uniform(double L, int nr, int ns);
    // Power-law grading toward r = 0: r_i = L*(i/nr)^grading.
    static Grid graded(double L, int nr, int ns, double grading);
    double dr(int i) const { return r[i + 1] - r[i]; }
};

// Streamline-deflection unknown phi(r, s) with its grid and profile.
// h = H + phi; no-stagnation requires phi_s + H_s > 0.
struct HeightField {
    std::shared_ptr<const LaminarProfile> profile;
    Grid grid;
    std::vector<double> phi;  // node values, row-major: phi[i*(ns+1)+j]

    double& at(int i, int j) { return phi[i * (grid.ns + 1) + j]; }
    double at(int i, int j) const { return phi[i * (grid.ns + 1) + j]; }
    int n_nodes() const { return (grid.nr + 1) * (grid.ns + 1); }

    static HeightField zero(std::shared_ptr<const LaminarProfile> profile, Grid grid);

    double max_abs() const;
    // Surface trace h(r_i, 0) = 1 + phi(r_i, 0).
    std::vector<double> surface_height() const;
};

struct SolverOptions {
    double tol = 1e-10;           // residual sup-norm target
    int max_iter = 25;
    bool backtracking = true;     // residual-norm halving line search
    double stagnation_floor = 1e-6;  // lower bound enforced on phi_s + H_s
};

struct NewtonReport {
    std::vector<double> residual_history;  // sup norms, including final
    int iterations = 0;
    bool converged = false;
};

// Per-cell discrete state shared by the residual, Jacobian, and diagnostics.
// m is the cell-mean slope H_s + phi_s; the fluxes are written through the
// exact inverse kappa_C(m) of the cell-average map of the laminar family, so
// laminar members are exact discrete solutions (see cell_kappa below).
struct CellFluxes {
    // Row-major over cells: index c = i*ns + j.
    std::vector<double> phi_r, phi_s, m, g1, g2;
};

// Residual of the finite-volume discretization of the height equation.
// R has one row per node: interior/top rows are flux divergences (top closes
// with the Robin flux phi/F^2), bottom and far-field rows are phi = 0.
// Throws StagnationError when m <= floor at some cell (message names it).
Eigen::VectorXd residual(const HeightField& f, double F,
                         const SolverOptions& opts = {}, CellFluxes* fluxes = nullptr);

// Non-throwing variant for line-search trials: returns false on a floor
// violation instead of throwing.
bool try_residual(const HeightField& f, double F, const SolverOptions& opts,
                  Eigen::VectorXd& out);

// Exact linearization of the discrete residual (9-point stencil).
Eigen::SparseMatrix<double> jacobian(const HeightField& f, double F,
                                     const SolverOptions& opts = {});

// Partial derivative of the residual with respect to F (nonzero on top rows).
Eigen::VectorXd residual_dF(const HeightField& f, double F);

// Damped Newton with sparse-LU solves.
HeightField newton_solve(const HeightField& guess, double F, const SolverOptions& opts,
                         NewtonReport* report = nullptr);

// Tail ratio: max |phi| over the outer 10% of columns / max |phi|.
double decay_check(const HeightField& f);

// Zero-pad to a longer half strip (same spacing) and re-solve.
HeightField extend_domain(const HeightField& f, double F, double newL,
                          const SolverOptions& opts);

// Exact inverse of the cell-average slope map for s-cell j of the profile:
// returns the kappa with (1/ds) * int_cell (kappa+2Gamma)^{-1/2} = m.
double cell_kappa(const LaminarProfile& p, int j, double m);

// Serialization: columnar text (r, s, phi) and a compact little-endian binary
// block; both round-trip (text to 1e-12, binary bit-exactly).
void write_field_text(const HeightField& f, double F, std::ostream& os);
void write_field_binary(const HeightField& f, double F, std::ostream& os);
HeightField read_field_binary(std::shared_ptr<const LaminarProfile> profile,
                              std::istream& is, double* F = nullptr);

}  // namespace solwave
