#include "solwave/small_amplitude.hpp"

#include <cmath>

#include "solwave/sturm_liouville.hpp"

namespace solwave {

namespace {

// 5-point Gauss-Legendre nodes/weights on [0, 1].
constexpr double kGx[5] = {0.046910077030668, 0.230765344947158, 0.5,
                           0.769234655052841, 0.953089922969332};
constexpr double kGw[5] = {0.118463442528095, 0.239314335249683, 0.284444444444444,
                           0.239314335249683, 0.118463442528095};

}  // namespace

KdvScaling kdv_scaling(const LaminarProfile& p) {
    KdvScaling k;
    k.I5 = p.int_pow(p.lambda, -2.5);

    const std::vector<double> phi = phi_ivp(p);
    k.phi_cr0 = phi.back();

    // Iw = int Phi^2/H_s ds. Inside a cell Phi(s) = Phi_a + (w_a^{-1/2} -
    // w(s)^{-1/2})/(gamma*H_s(-1)^3) (or linear when gamma = 0), which is
    // analytic, so per-cell Gauss quadrature is accurate to rounding.
    const double hsb3 = p.Hs[0] * p.Hs[0] * p.Hs[0];
    double iw = 0.0;
    for (int j = 0; j < p.n_cells(); ++j) {
        const double ds = p.ds(j), wa = p.lambda + 2.0 * p.Gamma[j];
        const double g = p.gamma[j];
        for (int q = 0; q < 5; ++q) {
            const double t = kGx[q] * ds;
            const double w = wa + 2.0 * g * t;
            double phival;
            if (std::abs(g) * ds > 1e-14 * w)
                phival = phi[j] + (1.0 / std::sqrt(wa) - 1.0 / std::sqrt(w)) / (g * hsb3);
            else
                phival = phi[j] + t / (wa * std::sqrt(wa) * hsb3);
            iw += kGw[q] * ds * phival * phival * std::sqrt(w);  // 1/H_s = sqrt(w)
        }
    }
    k.Iw = iw;

    const double u10 = 1.0 / p.mu_cr;  // int H_s^3 ds
    k.cA = u10 * u10 / k.I5;
    k.cW = k.phi_cr0 / std::sqrt(k.Iw);
    return k;
}

double froude_from_epsilon(const LaminarProfile& p, double eps) {
    if (!(eps > 0.0) || !(eps < p.mu_cr))
        throw ConfigError("froude_from_epsilon: need 0 < eps < mu_cr");
    return 1.0 / std::sqrt(p.mu_cr - eps);
}

std::vector<double> reduced_orbit(double eps, const std::vector<double>& R_grid) {
    if (!(eps > 0.0)) throw ConfigError("reduced_orbit: eps must be > 0");
    std::vector<double> z(R_grid.size());
    for (size_t i = 0; i < R_grid.size(); ++i) {
        const double c = std::cosh(0.5 * R_grid[i]);
        z[i] = 1.0 / (c * c);
    }
    return z;
}

double recommended_length(const KdvScaling& k, double eps) {
    // sech^2 tail ~ 4*exp(-cW*sqrt(eps)*L); 22 e-foldings leave ~1e-9.
    return 22.0 / (k.cW * std::sqrt(eps));
}

HeightField initial_guess(std::shared_ptr<const LaminarProfile> profile, double eps,
                          Grid grid, double eps_max) {
    if (!(eps > 0.0) || eps > eps_max)
        throw ConfigError("initial_guess: eps outside (0, eps_max]");
    const KdvScaling k = kdv_scaling(*profile);
    const double decay_rate = k.cW * std::sqrt(eps);
    if (decay_rate * grid.L < 15.0)
        throw DomainError("initial_guess: grid shorter than the seed decay length");

    const CenterEigenvectors ev = center_eigenvectors(*profile);
    HeightField f = HeightField::zero(std::move(profile), std::move(grid));
    const double amp = eps * k.cA;
    for (int i = 0; i < f.grid.nr; ++i) {  // far column stays 0 (Dirichlet)
        const double c = std::cosh(0.5 * decay_rate * f.grid.r[i]);
        const double envelope = amp / (c * c);
        for (int j = 0; j <= f.grid.ns; ++j) f.at(i, j) = envelope * ev.u1[j];
    }
    return f;
}

}  // namespace solwave
