#include "solwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace solwave {

const char* flag_name(Flag f) {
    switch (f) {
        case Flag::pass: return "pass";
        case Flag::fail: return "fail";
        default: return "n/a";
    }
}

namespace {

// Column quadrature of the flow-force integrand. Each cell is treated as a
// member of the local laminar family with kappa_C = cell_kappa(m), so that
// 1/h_s = sqrt(kappa_C + 2 Gamma(s)) and all pieces integrate in closed form;
// the (h-1) h_s piece telescopes through the node heights exactly.
double column_flow_force(const HeightField& f, double F, int i) {
    const LaminarProfile& p = *f.profile;
    const double mu = 1.0 / (F * F);
    const double dri = f.grid.dr(i);
    double S = 0.0;
    for (int j = 0; j < f.grid.ns; ++j) {
        const double ds = p.ds(j);
        const double p00 = f.at(i, j), p01 = f.at(i, j + 1);
        const double p10 = f.at(i + 1, j), p11 = f.at(i + 1, j + 1);
        const double pr = (p10 + p11 - p00 - p01) / (2.0 * dri);
        const double ps = (p01 + p11 - p00 - p10) / (2.0 * ds);
        const double m = (p.H[j + 1] - p.H[j]) / ds + ps;
        if (!(m > 0.0)) throw StagnationError("flow_force: non-positive h_s cell");
        const double kc = cell_kappa(p, j, m);
        const double i_half = p.cell_int_pow(kc, 0.5, j);  // int 1/h_s ds
        // (1-h_r^2)/(2 h_s^2) * h_s  +  h_s/(2 H_s^2), using 1/H_s^2 = lambda+2Gamma:
        S += (1.0 - 0.5 * pr * pr) * i_half + 0.5 * (p.lambda - kc) * ds * m;
        // -(1/F^2)(h-1) h_s integrates to the difference of (h-1)^2/2.
        const double ha = p.H[j] + 0.5 * (p00 + p10) - 1.0;
        const double hb = p.H[j + 1] + 0.5 * (p01 + p11) - 1.0;
        S -= 0.5 * mu * (hb * hb - ha * ha);
    }
    return S;
}

}  // namespace

double flow_force(const HeightField& f, double F, int col) {
    if (col < 0 || col >= f.grid.nr) throw ConfigError("flow_force: column out of range");
    return column_flow_force(f, F, col);
}

std::vector<double> flow_force_columns(const HeightField& f, double F) {
    std::vector<double> v(f.grid.nr);
    for (int i = 0; i < f.grid.nr; ++i) v[i] = column_flow_force(f, F, i);
    return v;
}

double laminar_flow_force(const LaminarProfile& p, double kappa, double F) {
    p.require_in_family(kappa);
    const double h0 = laminar_height(p, kappa, 0.0);
    const double mu = 1.0 / (F * F);
    return 0.5 * (p.lambda - kappa) * h0 - 0.5 * mu * (h0 - 1.0) * (h0 - 1.0) + 0.5 * mu +
           p.int_pow(kappa, 0.5);
}

QualitativeFlags qualitative_check(const HeightField& f, double F) {
    (void)F;
    const double amp = f.max_abs();
    if (amp == 0.0) return {Flag::not_applicable, Flag::not_applicable};
    const double tol_q = 1e-8 * amp;

    Flag elevation = Flag::pass;
    for (int i = 0; i < f.grid.nr && elevation == Flag::pass; ++i)
        for (int j = 1; j <= f.grid.ns; ++j)
            if (f.at(i, j) < -tol_q) {
                elevation = Flag::fail;
                break;
            }

    Flag monotone = Flag::pass;
    for (int i = 0; i < f.grid.nr && monotone == Flag::pass; ++i) {
        const double dri = f.grid.dr(i);
        for (int j = 0; j < f.grid.ns; ++j) {
            const double pr = (f.at(i + 1, j) + f.at(i + 1, j + 1) - f.at(i, j) -
                               f.at(i, j + 1)) /
                              (2.0 * dri);
            if (pr > tol_q) {
                monotone = Flag::fail;
                break;
            }
        }
    }
    return {elevation, monotone};
}

FroudeBoundReport froude_bound_check(const HeightField& f, double F) {
    const LaminarProfile& p = *f.profile;
    const double hs_sup = *std::max_element(p.Hs.begin(), p.Hs.end());
    const double hs_surf = p.Hs.back();
    const double coef = 2.0 / M_PI * hs_sup * hs_sup;

    // Crest-column reading: sup_s |phi_s(0, s) + H_s(0)| from the i = 0 cells.
    double crest = 0.0;
    for (int j = 0; j < f.grid.ns; ++j) {
        const double ps = (f.at(0, j + 1) + f.at(1, j + 1) - f.at(0, j) - f.at(1, j)) /
                          (2.0 * p.ds(j));
        crest = std::max(crest, std::abs(ps + hs_surf));
    }
    // Surface-trace reading: sup_r |phi_s(r, 0) + H_s(0)| from the top cells.
    double surf = 0.0;
    const int jt = f.grid.ns - 1;
    for (int i = 0; i < f.grid.nr; ++i) {
        const double ps = (f.at(i, jt + 1) + f.at(i + 1, jt + 1) - f.at(i, jt) -
                           f.at(i + 1, jt)) /
                          (2.0 * p.ds(jt));
        surf = std::max(surf, std::abs(ps + hs_surf));
    }

    FroudeBoundReport rep;
    rep.slack_crest = coef * crest - F * F;
    rep.slack_surface = coef * surf - F * F;
    const double tol_q = 1e-8 * std::max(1.0, F * F);
    rep.flag = f.max_abs() == 0.0 ? Flag::not_applicable
                                  : (rep.slack_crest >= -tol_q ? Flag::pass : Flag::fail);
    return rep;
}

StagnationMeasures stagnation_measures(const HeightField& f) {
    const LaminarProfile& p = *f.profile;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < f.grid.nr; ++i)
        for (int j = 0; j < f.grid.ns; ++j) {
            const double ds = p.ds(j);
            const double ps = (f.at(i, j + 1) + f.at(i + 1, j + 1) - f.at(i, j) -
                               f.at(i + 1, j)) /
                              (2.0 * ds);
            const double m = (p.H[j + 1] - p.H[j]) / ds + ps;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    return {lo, hi, 1.0 / hi};
}

DiagnosticsReport diagnose(const HeightField& f, double F) {
    DiagnosticsReport d;
    d.flow_force_columns = flow_force_columns(f, F);
    const auto [mn, mx] = std::minmax_element(d.flow_force_columns.begin(),
                                              d.flow_force_columns.end());
    double mean = 0.0;
    for (double v : d.flow_force_columns) mean += v;
    mean /= static_cast<double>(d.flow_force_columns.size());
    d.flow_force_spread = (*mx - *mn) / std::max(1e-300, std::abs(mean));

    const QualitativeFlags q = qualitative_check(f, F);
    d.elevation = q.elevation;
    d.monotone = q.monotone;

    d.supercritical_margin = F - critical_froude(*f.profile).F_cr;

    const FroudeBoundReport fb = froude_bound_check(f, F);
    d.froude_bound_slack = fb.slack_crest;
    d.froude_bound_slack_surface = fb.slack_surface;
    d.froude_bound = fb.flag;

    const StagnationMeasures sm = stagnation_measures(f);
    d.min_hs = sm.min_hs;
    d.max_hs = sm.max_hs;
    d.min_cu = sm.min_cu;
    return d;
}

void write_diagnostics(const DiagnosticsReport& d, std::ostream& os) {
    os << std::setprecision(12);
    os << "flow_force_spread " << d.flow_force_spread << '\n'
       << "elevation " << flag_name(d.elevation) << '\n'
       << "monotone " << flag_name(d.monotone) << '\n'
       << "supercritical_margin " << d.supercritical_margin << '\n'
       << "froude_bound " << flag_name(d.froude_bound) << " slack_crest "
       << d.froude_bound_slack << " slack_surface " << d.froude_bound_slack_surface << '\n'
       << "min_hs " << d.min_hs << " max_hs " << d.max_hs << " min_cu " << d.min_cu << '\n'
       << "pressure_velocity_bounds " << flag_name(d.pressure_velocity_bounds)
       << " pressure_min " << d.pressure_bound_min << " velocity_slack "
       << d.velocity_bound_slack << '\n';
}

}  // namespace solwave
