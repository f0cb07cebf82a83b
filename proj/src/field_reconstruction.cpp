#include "solwave/field_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <ostream>

namespace solwave {

namespace {

// Node-sampled gradients of phi (central differences; symmetry at r = 0).
void node_gradients(const HeightField& f, std::vector<double>& pr,
                    std::vector<double>& ps) {
    const int nr = f.grid.nr, ns = f.grid.ns, stride = ns + 1;
    const LaminarProfile& p = *f.profile;
    pr.assign(f.n_nodes(), 0.0);
    ps.assign(f.n_nodes(), 0.0);
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j <= ns; ++j) {
            double dr_val;
            if (i == 0)
                dr_val = 0.0;  // evenness across the symmetry face
            else if (i == nr)
                dr_val = (f.at(i, j) - f.at(i - 1, j)) / f.grid.dr(i - 1);
            else
                dr_val = (f.at(i + 1, j) - f.at(i - 1, j)) /
                         (f.grid.r[i + 1] - f.grid.r[i - 1]);
            double ds_val;
            if (j == 0)
                ds_val = (f.at(i, 1) - f.at(i, 0)) / p.ds(0);
            else if (j == ns)
                ds_val = (f.at(i, ns) - f.at(i, ns - 1)) / p.ds(ns - 1);
            else
                ds_val = (f.at(i, j + 1) - f.at(i, j - 1)) / (p.s[j + 1] - p.s[j - 1]);
            pr[i * stride + j] = dr_val;
            ps[i * stride + j] = ds_val;
        }
    }
}

// Fritsch-Carlson monotone cubic slopes for data (x ascending, f monotone).
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& f) {
    const int n = static_cast<int>(x.size());
    std::vector<double> d(n - 1), m(n);
    for (int k = 0; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k]) / (x[k + 1] - x[k]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (int k = 1; k + 1 < n; ++k)
        m[k] = (d[k - 1] * d[k] <= 0.0) ? 0.0 : 2.0 * d[k - 1] * d[k] / (d[k - 1] + d[k]);
    return m;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& f,
                  const std::vector<double>& m, int k, double xv) {
    const double h = x[k + 1] - x[k], t = (xv - x[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return f[k] * (2 * t3 - 3 * t2 + 1) + h * m[k] * (t3 - 2 * t2 + t) +
           f[k + 1] * (-2 * t3 + 3 * t2) + h * m[k + 1] * (t3 - t2);
}

uint64_t profile_hash(const LaminarProfile& p) {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (double v : p.s) mix(v);
    for (double v : p.Hs) mix(v);
    mix(p.lambda);
    return h;
}

}  // namespace

EulerianFields to_eulerian(const HeightField& f, double F, double P_atm) {
    const LaminarProfile& p = *f.profile;
    const int nr = f.grid.nr, ns = f.grid.ns, stride = ns + 1;
    EulerianFields e;
    e.profile = f.profile;
    e.grid = f.grid;
    e.F = F;
    e.P_atm = P_atm;
    const double mu = 1.0 / (F * F);
    e.Q = p.lambda + 2.0 * mu;

    std::vector<double> pr, ps;
    node_gradients(f, pr, ps);

    e.x = f.grid.r;
    e.y.resize(f.n_nodes());
    e.u.resize(f.n_nodes());
    e.v.resize(f.n_nodes());
    e.psi.resize(f.n_nodes());
    e.eta.resize(nr + 1);

    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j <= ns; ++j) {
            const int k = i * stride + j;
            const double h = p.H[j] + f.at(i, j);
            const double hs = p.Hs[j] + ps[k];
            if (!(hs > 0.0)) throw StagnationError("to_eulerian: h_s <= 0 at a node");
            double urel, vv;
            if (j == ns) {
                // Dynamic boundary condition closes the surface trace exactly.
                const double q2 = std::max(0.0, e.Q - 2.0 * mu * h);
                urel = -std::sqrt(q2 / (1.0 + pr[k] * pr[k]));
                vv = pr[k] * urel;
            } else {
                urel = -1.0 / hs;
                vv = pr[k] * urel;
            }
            e.y[k] = h - 1.0;
            e.u[k] = p.c_nd + urel;
            e.v[k] = vv;
            e.psi[k] = -p.s[j];
        }
        e.eta[i] = p.H[ns] + f.at(i, ns) - 1.0;
    }
    return e;
}

void pressure_field(EulerianFields& e) {
    const LaminarProfile& p = *e.profile;
    const int stride = e.stride();
    const double mu = 1.0 / (e.F * e.F);
    e.P.resize(e.y.size());
    for (int i = 0; i <= e.grid.nr; ++i)
        for (int j = 0; j <= e.grid.ns; ++j) {
            const int k = i * stride + j;
            const double urel = e.u[k] - p.c_nd;
            e.P[k] = -0.5 * (urel * urel + e.v[k] * e.v[k]) - mu * (e.y[k] + 1.0) +
                     p.Gamma[j] + 0.5 * e.Q + e.P_atm;
        }
}

BoundCheckReport bound_checks(const EulerianFields& e, const LaminarProfile& p, double F) {
    if (e.P.empty()) throw ConfigError("bound_checks: run pressure_field first");
    BoundCheckReport rep;
    const double gplus = p.gamma_plus_sup();
    const double F0 = critical_froude(p).F_cr;
    const double Ebound = std::abs(0.5 * e.Q + e.P_atm);
    const double rhs = 2.0 * gplus + 2.0 / F0 + 2.0 * Ebound;

    double pmin = 1e300, vmax = 0.0;
    const int stride = e.stride();
    for (int i = 0; i <= e.grid.nr; ++i)
        for (int j = 0; j <= e.grid.ns; ++j) {
            const int k = i * stride + j;
            pmin = std::min(pmin, e.P[k] - e.P_atm + 0.5 * gplus * e.psi[k]);
            const double urel = e.u[k] - p.c_nd;
            vmax = std::max(vmax, urel * urel + e.v[k] * e.v[k]);
        }
    rep.pressure_bound_min = pmin;
    rep.velocity_bound_slack = rhs - vmax;
    (void)F;
    rep.flag = (pmin >= -1e-8 && rep.velocity_bound_slack >= 0.0) ? Flag::pass : Flag::fail;
    return rep;
}

double psi_column_error(const EulerianFields& e) {
    const LaminarProfile& p = *e.profile;
    const int stride = e.stride();
    double err = 0.0;
    for (int i = 0; i <= e.grid.nr; ++i) {
        double psi_hat = 1.0;  // psi = 1 on the bed
        for (int j = 0; j < e.grid.ns; ++j) {
            const int k = i * stride + j;
            const double u0 = e.u[k] - p.c_nd, u1 = e.u[k + 1] - p.c_nd;
            psi_hat += 0.5 * (u0 + u1) * (e.y[k + 1] - e.y[k]);
            err = std::max(err, std::abs(psi_hat + p.s[j + 1]));
        }
    }
    return err;
}

RoundtripReport roundtrip(const EulerianFields& e) {
    const LaminarProfile& p = *e.profile;
    const int nr = e.grid.nr, ns = e.grid.ns, stride = ns + 1;
    RoundtripReport rep;
    rep.field = HeightField::zero(e.profile, e.grid);

    double max_dy = 0.0;
    for (int i = 0; i <= nr; ++i) {
        // Column samples.
        std::vector<double> yv(ns + 1), psiv(ns + 1);
        for (int j = 0; j <= ns; ++j) yv[j] = e.y[i * stride + j];
        for (int j = 0; j < ns; ++j) {
            if (!(yv[j + 1] > yv[j]))
                throw InversionError("roundtrip: non-monotone y (psi overturn) in a column");
            max_dy = std::max(max_dy, yv[j + 1] - yv[j]);
        }
        // Independent psi via trapezoid integration of psi_y = u-c.
        psiv[0] = 1.0;
        for (int j = 0; j < ns; ++j) {
            const double u0 = e.u[i * stride + j] - p.c_nd;
            const double u1 = e.u[i * stride + j + 1] - p.c_nd;
            psiv[j + 1] = psiv[j] + 0.5 * (u0 + u1) * (yv[j + 1] - yv[j]);
        }
        for (int j = 0; j < ns; ++j)
            if (!(psiv[j + 1] < psiv[j]))
                throw InversionError("roundtrip: reconstructed psi not strictly decreasing");

        const std::vector<double> slopes = pchip_slopes(yv, psiv);
        for (int j = 0; j <= ns; ++j) {
            const double target = -p.s[j];
            double yhat;
            if (target >= psiv[0]) {
                yhat = yv[0] + (target - psiv[0]) / slopes[0];
            } else if (target <= psiv[ns]) {
                yhat = yv[ns] + (target - psiv[ns]) / slopes[ns];
            } else {
                int k = 0;
                while (k + 1 < ns && psiv[k + 1] > target) ++k;
                double lo = yv[k], hi = yv[k + 1];
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (pchip_eval(yv, psiv, slopes, k, mid) > target ? lo : hi) = mid;
                }
                yhat = 0.5 * (lo + hi);
            }
            const double h_hat = yhat + 1.0;
            rep.field.at(i, j) = h_hat - p.H[j];
            rep.error_sup = std::max(rep.error_sup, std::abs(h_hat - (yv[j] + 1.0)));
        }
    }
    rep.tol_interp = max_dy * max_dy;
    return rep;
}

void write_eulerian(const EulerianFields& e, std::ostream& os) {
    const LaminarProfile& p = *e.profile;
    os << std::setprecision(17);
    os << "# eulerian fields: x y u v psi P (dimensionless)\n";
    os << "# scales: length=" << p.depth << " velocity=" << p.vel_scale
       << " pressure=rho*" << p.vel_scale * p.vel_scale << '\n';
    os << "# F=" << e.F << " eps_equiv=" << p.mu_cr - 1.0 / (e.F * e.F)
       << " Q=" << e.Q << " P_atm=" << e.P_atm << " profile_hash=" << std::hex
       << profile_hash(p) << std::dec << '\n';
    const int stride = e.stride();
    for (int i = 0; i <= e.grid.nr; ++i)
        for (int j = 0; j <= e.grid.ns; ++j) {
            const int k = i * stride + j;
            os << e.x[i] << ' ' << e.y[k] << ' ' << e.u[k] << ' ' << e.v[k] << ' '
               << e.psi[k] << ' ' << (e.P.empty() ? 0.0 : e.P[k]) << '\n';
        }
}

void write_surface(const EulerianFields& e, std::ostream& os) {
    const LaminarProfile& p = *e.profile;
    os << std::setprecision(17);
    os << "# surface profile: x eta (dimensionless; multiply by length scale "
       << p.depth << ")\n";
    os << "# F=" << e.F << " eps_equiv=" << p.mu_cr - 1.0 / (e.F * e.F)
       << " profile_hash=" << std::hex << profile_hash(p) << std::dec << '\n';
    for (int i = 0; i <= e.grid.nr; ++i) os << e.x[i] << ' ' << e.eta[i] << '\n';
}

}  // namespace solwave
