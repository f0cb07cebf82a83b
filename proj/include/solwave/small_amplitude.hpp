#pragma once

#include <vector>

#include "solwave/background_flow.hpp"
#include "solwave/height_solver.hpp"

namespace solwave {

// Constants of the KdV-scaled seed. The raw integrals use the unit-slope
// eigenfunction Phi (Phi(-1) = 0, Phi_s(-1) = 1); the amplitude/width factors
// are the scale-free combinations built on u1(s) = int_{-1}^s H_s^3 dt that
// reproduce the classical sech^2 soliton in the irrotational limit.
struct KdvScaling {
    double phi_cr0 = 0.0;  // Phi(0)
    double I5 = 0.0;       // int_{-1}^0 H_s^5 ds
    double Iw = 0.0;       // int_{-1}^0 Phi^2 / H_s ds
    double cA = 0.0;       // amplitude factor u1(0)^2 / I5
    double cW = 0.0;       // width factor u1(0)/sqrt(int u1^2/H_s) = Phi(0)/sqrt(Iw)
};

KdvScaling kdv_scaling(const LaminarProfile& p);

// Supercritical parameterization 1/(F^eps)^2 = mu_cr - eps.
double froude_from_epsilon(const LaminarProfile& p, double eps);

// Leading-order reduced orbit Z1(R) = sech^2(R/2).
std::vector<double> reduced_orbit(double eps, const std::vector<double>& R_grid);

// Half-length needed for the seed tail to decay below ~1e-9 of the amplitude.
double recommended_length(const KdvScaling& k, double eps);

// Seed field phi(r,s) = eps * cA * sech^2(cW*sqrt(eps)*r/2) * u1(s), zeroed on
// the far-field Dirichlet column. Throws DomainError when the grid is too
// short for the decay length, ConfigError for eps outside (0, eps_max].
HeightField initial_guess(std::shared_ptr<const LaminarProfile> profile, double eps,
                          Grid grid, double eps_max = 0.05);

}  // namespace solwave
