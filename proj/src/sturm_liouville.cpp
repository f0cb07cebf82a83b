#include "solwave/sturm_liouville.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>

namespace solwave {

namespace {

// Cumulative integral of H_s^3 = (lambda+2Gamma)^{-3/2} at the profile nodes.
std::vector<double> cum_hs3(const LaminarProfile& p) {
    std::vector<double> c(p.s.size());
    c[0] = 0.0;
    for (int j = 0; j < p.n_cells(); ++j)
        c[j + 1] = c[j] + p.cell_int_pow(p.lambda, -1.5, j);
    return c;
}

// Bisection for a scalar root with an established sign change on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(mid))) return mid;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0))
            lo = mid, flo = fm;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> phi_ivp(const LaminarProfile& p) {
    std::vector<double> phi = cum_hs3(p);
    const double scale = 1.0 / (p.Hs[0] * p.Hs[0] * p.Hs[0]);
    for (double& v : phi) v *= scale;
    return phi;
}

double a_of_mu(const LaminarProfile& p, double mu) {
    const std::vector<double> phi = phi_ivp(p);
    // Phi_s(0) = H_s(0)^3 * Phi_s(-1)/H_s(-1)^3 ... recovered from the flux
    // invariant of the IVP: (Phi_s/H_s^3) is constant (= 1/H_s(-1)^3) when
    // nu = 0, so Phi_s(0)/H_s(0)^3 = 1/H_s(-1)^3.
    const double hsb = p.Hs[0];
    return -1.0 / (hsb * hsb * hsb) + mu * phi.back();
}

ShootingState shoot(const LaminarProfile& p, double nu, int steps_per_unit) {
    ShootingState st;
    st.nu = nu;
    const int nc = p.n_cells();
    st.t.resize(nc + 1);
    st.a.resize(nc + 1);
    st.b.resize(nc + 1);
    st.t[0] = 0.0;
    st.a[0] = 0.0;
    st.b[0] = 1.0;

    for (int j = 0; j < nc; ++j) {
        // Travel time across the cell: 1/H_s = (lambda+2Gamma)^{1/2}.
        const double dt_cell = p.cell_int_pow(p.lambda, 0.5, j);
        st.t[j + 1] = st.t[j] + dt_cell;

        // Inside the cell, w = lambda+2Gamma obeys d(w^{3/2})/dt = 3 gamma,
        // so the coefficient H_s^4 = w^{-2} is available in closed form at
        // any RK4 stage point.
        const double wa = p.lambda + 2.0 * p.Gamma[j];
        const double wa32 = wa * std::sqrt(wa);
        const double g3 = 3.0 * p.gamma[j];
        auto hs4 = [&](double tau) {
            const double w32 = wa32 + g3 * tau;
            const double w = std::cbrt(w32 * w32);
            return 1.0 / (w * w);
        };

        const int nsub = std::max(1, static_cast<int>(std::ceil(dt_cell * steps_per_unit)));
        const double h = dt_cell / nsub;
        double a = st.a[j], b = st.b[j];
        for (int k = 0; k < nsub; ++k) {
            const double tau = k * h;
            const double c0 = hs4(tau), ch = hs4(tau + 0.5 * h), c1 = hs4(tau + h);
            const double ka1 = c0 * b, kb1 = -nu * a;
            const double ka2 = ch * (b + 0.5 * h * kb1), kb2 = -nu * (a + 0.5 * h * ka1);
            const double ka3 = ch * (b + 0.5 * h * kb2), kb3 = -nu * (a + 0.5 * h * ka2);
            const double ka4 = c1 * (b + h * kb3), kb4 = -nu * (a + h * ka3);
            a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
            b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
        }
        st.a[j + 1] = a;
        st.b[j + 1] = b;
    }
    st.t0 = st.t[nc];
    return st;
}

SpectrumReport eigenvalues(const LaminarProfile& p, double mu, int k, int steps_per_unit) {
    SpectrumReport rep;
    rep.mu = mu;
    if (k < 1) throw ConfigError("eigenvalues: k must be >= 1");

    auto a_end = [&](double nu) { return shoot(p, nu, steps_per_unit).a_end(); };
    auto g = [&](double nu) {
        const ShootingState st = shoot(p, nu, steps_per_unit);
        return st.b_end() - mu * st.a_end();
    };

    // Dirichlet poles: roots of a(t0; nu). WKB phase is sqrt(nu) * int H_s ds
    // = sqrt(nu), so poles sit near (j*pi)^2; scan in x = sqrt(nu) with step
    // pi/8 which cannot skip a sign change.
    const int need = k;  // poles 1..k bracket nu_1..nu_{k-1}; nu_0 lies below pole 1
    const double dx = M_PI / 8.0;
    double x_prev = dx, f_prev = a_end(x_prev * x_prev);
    int guard = 0;
    while (static_cast<int>(rep.dirichlet_poles.size()) < need) {
        if (++guard > 16 * (need + 2) * 8)
            throw SpectralScanError("eigenvalues: Dirichlet pole scan exhausted");
        const double x = x_prev + dx;
        const double f = a_end(x * x);
        if ((f > 0.0) != (f_prev > 0.0)) {
            const double root_x =
                bisect([&](double xx) { return a_end(xx * xx); }, x_prev, x, f_prev);
            rep.dirichlet_poles.push_back(root_x * root_x);
        }
        x_prev = x;
        f_prev = f;
    }

    // nu_0: unique root of g below the first pole. Expand the bracket
    // geometrically to the left on failure (range contract: down to -4 nu_1).
    {
        const double nuD1 = rep.dirichlet_poles[0];
        const double hi = nuD1 * (1.0 - 1e-9) - 1e-12;
        double ghi = g(hi);
        double span = std::max(1.0, nuD1);
        double lo = hi, glo = ghi;
        bool bracketed = false;
        while (span <= 64.0 * std::max(1.0, nuD1)) {
            lo = hi - span;
            glo = g(lo);
            if ((glo > 0.0) != (ghi > 0.0)) {
                bracketed = true;
                break;
            }
            span *= 2.0;
        }
        if (!bracketed) throw SpectralScanError("eigenvalues: failed to bracket nu_0");
        rep.brackets.emplace_back(lo, hi);
        rep.eigenvalues.push_back(bisect(g, lo, hi, glo));
    }

    // nu_j between consecutive poles, where B = b/a is strictly decreasing.
    for (int j = 1; j < k; ++j) {
        const double pa = rep.dirichlet_poles[j - 1];
        const double pb = rep.dirichlet_poles[j];
        const double gap = pb - pa;
        double lo = pa + 1e-9 * gap, hi = pb - 1e-9 * gap;
        double glo = g(lo), ghi = g(hi);
        if ((glo > 0.0) == (ghi > 0.0)) {
            // Roundoff at the poles; fall back to an interior scan.
            bool found = false;
            const int m = 64;
            double xp = lo, fp = glo;
            for (int i = 1; i <= m; ++i) {
                const double x = pa + gap * i / (m + 1.0);
                const double f = g(x);
                if ((f > 0.0) != (fp > 0.0)) {
                    lo = xp, glo = fp, hi = x;
                    found = true;
                    break;
                }
                xp = x, fp = f;
            }
            if (!found)
                throw SpectralScanError("eigenvalues: failed to bracket an interior eigenvalue");
        }
        rep.brackets.emplace_back(lo, hi);
        rep.eigenvalues.push_back(bisect(g, lo, hi, glo));
    }

    // Eigenfunction samples for nu_0 (a-values at the s-nodes).
    const ShootingState st0 = shoot(p, rep.eigenvalues.front(), steps_per_unit);
    rep.eigenfunction_s = p.s;
    rep.eigenfunction = st0.a;
    return rep;
}

AuxiliaryPhiReport auxiliary_phi(const LaminarProfile& p, double F, double eps_a) {
    AuxiliaryPhiReport rep;
    rep.eps_a = eps_a;
    const int nc = p.n_cells();
    rep.phi.resize(nc + 1);
    rep.phi_s.resize(nc + 1);

    // State (phi~, q~ = phi~_s/H_s^3): phi~' = H_s^3 q~, q~' = -(eps/F^2) phi~.
    // Initial data phi~(-1) = eps_a, phi~_s(-1) = 1 gives q~(-1) = 1/H_s(-1)^3.
    const double coef = -eps_a / (F * F);
    double phi = eps_a;
    double q = 1.0 / (p.Hs[0] * p.Hs[0] * p.Hs[0]);
    rep.phi[0] = phi;
    rep.phi_s[0] = 1.0;

    for (int j = 0; j < nc; ++j) {
        const double sa = p.s[j], ds = p.ds(j);
        const double Ga = p.Gamma[j], gam = p.gamma[j];
        auto hs3 = [&](double s) {
            const double w = p.lambda + 2.0 * (Ga + gam * (s - sa));
            return 1.0 / (w * std::sqrt(w));
        };
        const int nsub = 64;
        const double h = ds / nsub;
        for (int kk = 0; kk < nsub; ++kk) {
            const double s = sa + kk * h;
            const double c0 = hs3(s), ch = hs3(s + 0.5 * h), c1 = hs3(s + h);
            const double kp1 = c0 * q, kq1 = coef * phi;
            const double kp2 = ch * (q + 0.5 * h * kq1), kq2 = coef * (phi + 0.5 * h * kp1);
            const double kp3 = ch * (q + 0.5 * h * kq2), kq3 = coef * (phi + 0.5 * h * kp2);
            const double kp4 = c1 * (q + h * kq3), kq4 = coef * (phi + h * kp3);
            phi += h / 6.0 * (kp1 + 2.0 * kp2 + 2.0 * kp3 + kp4);
            q += h / 6.0 * (kq1 + 2.0 * kq2 + 2.0 * kq3 + kq4);
        }
        rep.phi[j + 1] = phi;
        rep.phi_s[j + 1] = q * p.Hs[j + 1] * p.Hs[j + 1] * p.Hs[j + 1];
    }

    rep.min_phi = *std::min_element(rep.phi.begin() + 1, rep.phi.end());
    rep.min_phi_s = *std::min_element(rep.phi_s.begin() + 1, rep.phi_s.end());
    const double hs0 = p.Hs.back();
    rep.boundary_value = -rep.phi_s.back() / (hs0 * hs0 * hs0) + rep.phi.back() / (F * F);
    rep.positivity_ok = rep.min_phi > 0.0 && rep.min_phi_s > 0.0;
    rep.boundary_sign_ok = rep.boundary_value < 0.0;
    return rep;
}

AuxiliaryPhiReport auxiliary_phi_auto(const LaminarProfile& p, double F) {
    AuxiliaryPhiReport rep;
    for (int e = 2; e <= 12; ++e) {
        rep = auxiliary_phi(p, F, std::pow(10.0, -e));
        if (rep.positivity_ok && rep.boundary_sign_ok) return rep;
    }
    return rep;  // sign failures are reported, not thrown
}

CenterEigenvectors center_eigenvectors(const LaminarProfile& p) {
    CenterEigenvectors ev;
    ev.u1 = cum_hs3(p);
    ev.u2.resize(ev.u1.size());
    for (size_t j = 0; j < ev.u1.size(); ++j) ev.u2[j] = ev.u1[j] / p.Hs[j];
    return ev;
}

void write_spectrum_table(const SpectrumReport& r, std::ostream& os) {
    os << "# mu = " << std::setprecision(17) << r.mu << "\n# j  nu_j  bracket_lo  bracket_hi\n";
    for (size_t j = 0; j < r.eigenvalues.size(); ++j)
        os << j << ' ' << r.eigenvalues[j] << ' ' << r.brackets[j].first << ' '
           << r.brackets[j].second << '\n';
    os << "# dirichlet poles:";
    for (double v : r.dirichlet_poles) os << ' ' << v;
    os << '\n';
}

}  // namespace solwave
