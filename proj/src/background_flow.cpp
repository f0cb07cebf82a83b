#include "solwave/background_flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace solwave {

namespace {

// Integral of (kappa + 2*Gamma)^q over a sub-interval of one cell, where
// Gamma is linear with slope g, w = kappa + 2*Gamma at the two ends, and
// len = interval length (w_b = w_a + 2*g*len).
double int_pow_linear(double wa, double wb, double g, double len, double q) {
    if (len <= 0.0) return 0.0;
    // Flat cell, or a slope so small the power-difference formula would
    // cancel catastrophically: midpoint value is then exact to rounding.
    if (std::abs(wb - wa) <= 1e-9 * std::max(wa, wb))
        return len * std::pow(0.5 * (wa + wb), q);
    const double p = q + 1.0;
    return (std::pow(wb, p) - std::pow(wa, p)) / (2.0 * g * p);
}

}  // namespace

void BackgroundCurrent::validate() const {
    if (!(depth > 0.0)) throw ConfigError("background current: depth must be > 0");
    if (!(gravity > 0.0)) throw ConfigError("background current: gravity must be > 0");
    if (!(wave_speed > 0.0)) throw ConfigError("background current: wave speed must be > 0");
    if (shear.size() < 2)
        throw ConfigError("background current: need at least two shear breakpoints");
    const double tol = 1e-12 * depth;
    if (std::abs(shear.front().y + depth) > tol)
        throw ConfigError("background current: first breakpoint must sit at y = -depth");
    if (std::abs(shear.back().y) > tol)
        throw ConfigError("background current: last breakpoint must sit at y = 0");
    for (size_t i = 0; i + 1 < shear.size(); ++i)
        if (!(shear[i + 1].y > shear[i].y))
            throw ConfigError("background current: breakpoints must be strictly increasing in y");
    for (const auto& b : shear)
        if (!(b.u > 0.0))
            throw StagnantBackgroundError(
                "background current: U* must be strictly positive at every breakpoint");
}

double LaminarProfile::gamma_plus_sup() const {
    double m = 0.0;
    for (double g : gamma) m = std::max(m, g);
    return m;
}

void LaminarProfile::require_in_family(double kappa) const {
    if (!(kappa + 2.0 * Gamma_min > 0.0)) {
        std::ostringstream msg;
        msg << "kappa = " << kappa << " is outside the laminar family (needs kappa > "
            << -2.0 * Gamma_min << ")";
        throw OutOfFamilyError(msg.str());
    }
}

double LaminarProfile::cell_int_pow(double kappa, double q, int j) const {
    return int_pow_linear(kappa + 2.0 * Gamma[j], kappa + 2.0 * Gamma[j + 1], gamma[j],
                          ds(j), q);
}

double LaminarProfile::int_pow(double kappa, double q) const {
    double acc = 0.0;
    for (int j = 0; j < n_cells(); ++j) acc += cell_int_pow(kappa, q, j);
    return acc;
}

LaminarProfile build_profile(const BackgroundCurrent& current, int n_s) {
    current.validate();
    if (n_s < 16) throw ConfigError("build_profile: n_s must be >= 16");

    const int nb = static_cast<int>(current.shear.size());
    const int nseg = nb - 1;

    // Non-dimensionalize: yt = y/d, ut = U* * d / int U* dy, so that
    // int_{-1}^0 ut dyt = 1 and the streamline coordinate s = int ut dyt - 1
    // runs exactly from -1 (bed) to 0 (surface).
    std::vector<double> yt(nb), ut(nb);
    double flux = 0.0;
    for (int i = 0; i + 1 < nb; ++i)
        flux += 0.5 * (current.shear[i].u + current.shear[i + 1].u) *
                (current.shear[i + 1].y - current.shear[i].y);
    for (int i = 0; i < nb; ++i) {
        yt[i] = current.shear[i].y / current.depth;
        ut[i] = current.shear[i].u * current.depth / flux;
    }

    // Segment slopes in yt and breakpoint images in s (trapezoid is exact for
    // piecewise-linear ut).
    std::vector<double> slope(nseg), sb(nb);
    sb[0] = -1.0;
    for (int i = 0; i < nseg; ++i) {
        slope[i] = (ut[i + 1] - ut[i]) / (yt[i + 1] - yt[i]);
        sb[i + 1] = sb[i] + 0.5 * (ut[i] + ut[i + 1]) * (yt[i + 1] - yt[i]);
    }
    sb[nb - 1] = 0.0;  // exact by normalization; clamp rounding

    // Distribute n_s cells over the segments proportionally to their s-extent,
    // at least one per segment, faces pinned to the breakpoint images.
    std::vector<int> ncell(nseg);
    int total = 0;
    for (int i = 0; i < nseg; ++i) {
        ncell[i] = std::max(1, static_cast<int>(std::lround(n_s * (sb[i + 1] - sb[i]))));
        total += ncell[i];
    }
    if (n_s < nseg)
        throw ResolutionError("build_profile: n_s smaller than the number of shear segments");
    while (total != n_s) {
        // Nudge the widest (or narrowest-per-cell) segment until counts match.
        int pick = 0;
        double best = 0.0;
        for (int i = 0; i < nseg; ++i) {
            const double per = (sb[i + 1] - sb[i]) / ncell[i];
            const double score = (total < n_s) ? per : (ncell[i] > 1 ? per : -1.0);
            if (score > best) best = score, pick = i;
        }
        if (total < n_s)
            ++ncell[pick], ++total;
        else if (ncell[pick] > 1)
            --ncell[pick], --total;
        else
            break;  // cannot shrink further; accept a slightly larger grid
    }

    LaminarProfile p;
    const double lambda = ut[nb - 1] * ut[nb - 1];
    p.lambda = lambda;
    p.depth = current.depth;
    p.gravity = current.gravity;
    p.vel_scale = flux / current.depth;
    p.c_nd = current.wave_speed / p.vel_scale;

    for (int i = 0; i < nseg; ++i) {
        const double s0 = sb[i], s1 = sb[i + 1];
        for (int k = 0; k < ncell[i]; ++k) {
            const double sv = s0 + (s1 - s0) * k / ncell[i];
            // Invert s -> yt on the segment: ut_a*dy + slope*dy^2/2 = s - s0,
            // stable quadratic branch.
            const double rhs = sv - s0;
            const double disc = std::sqrt(ut[i] * ut[i] + 2.0 * slope[i] * rhs);
            const double dy = 2.0 * rhs / (ut[i] + disc);
            const double y = yt[i] + dy;
            const double u = ut[i] + slope[i] * dy;
            p.s.push_back(sv);
            p.H.push_back(y + 1.0);
            p.Hs.push_back(1.0 / u);
            p.Gamma.push_back(0.5 * (u * u - lambda));
            p.gamma.push_back(slope[i]);
            if (k == 0 && i > 0 &&
                std::abs(slope[i] - slope[i - 1]) >
                    1e-14 * std::max(std::abs(slope[i]), std::abs(slope[i - 1])) + 1e-300)
                p.jump_faces.push_back(static_cast<int>(p.s.size()) - 1);
        }
    }
    // Surface node.
    p.s.push_back(0.0);
    p.H.push_back(1.0);
    p.Hs.push_back(1.0 / ut[nb - 1]);
    p.Gamma.push_back(0.0);

    p.Gamma_min = *std::min_element(p.Gamma.begin(), p.Gamma.end());
    p.mu_cr = 1.0 / p.int_pow(lambda, -1.5);
    return p;
}

double laminar_height(const LaminarProfile& p, double kappa, double s) {
    p.require_in_family(kappa);
    double acc = 0.0;
    for (int j = 0; j < p.n_cells(); ++j) {
        if (s >= p.s[j + 1]) {
            acc += p.cell_int_pow(kappa, -0.5, j);
        } else if (s > p.s[j]) {
            const double len = s - p.s[j];
            const double wa = kappa + 2.0 * p.Gamma[j];
            const double wb = wa + 2.0 * p.gamma[j] * len;
            acc += int_pow_linear(wa, wb, p.gamma[j], len, -0.5);
            break;
        } else {
            break;
        }
    }
    return acc;
}

std::vector<double> laminar_height_nodes(const LaminarProfile& p, double kappa) {
    p.require_in_family(kappa);
    std::vector<double> h(p.s.size());
    h[0] = 0.0;
    for (int j = 0; j < p.n_cells(); ++j)
        h[j + 1] = h[j] + p.cell_int_pow(kappa, -0.5, j);
    return h;
}

double mu_of_kappa(const LaminarProfile& p, double kappa) {
    p.require_in_family(kappa);
    // Removable singularity at kappa = lambda: return the limit value.
    if (std::abs(kappa - p.lambda) < 1e-8 * std::max(1.0, std::abs(p.lambda)))
        return p.mu_cr;
    const double h0 = laminar_height(p, kappa, 0.0);
    return 0.5 * (kappa - p.lambda) / (1.0 - h0);
}

CriticalFroude critical_froude(const LaminarProfile& p) {
    return {p.mu_cr, 1.0 / std::sqrt(p.mu_cr)};
}

double kappa_of_surface_height(const LaminarProfile& p, double h0) {
    if (!(h0 > 0.0)) throw OutOfFamilyError("kappa_of_surface_height: h0 must be > 0");
    const double kmin = -2.0 * p.Gamma_min;  // open lower limit of the family
    double lo = p.lambda, hi = p.lambda;     // H(0;lambda) = 1

    auto H0 = [&](double k) { return laminar_height(p, k, 0.0); };

    if (h0 < 1.0) {
        // H(0;kappa) decreases to 0 as kappa -> inf.
        double step = std::max(1.0, std::abs(p.lambda));
        while (H0(hi + step) > h0) step *= 2.0;
        hi += step;
    } else if (h0 > 1.0) {
        // Approach the family boundary from above; sup H(0;.) may be finite.
        const double gap = p.lambda - kmin;
        for (int m = 1;; ++m) {
            if (m > 60)
                throw OutOfFamilyError("kappa_of_surface_height: h0 above the attainable range");
            const double cand = kmin + gap * std::ldexp(1.0, -m);
            if (H0(cand) > h0) {
                lo = cand;
                break;
            }
            hi = cand;  // still below h0; tighten from above while descending
        }
    } else {
        return p.lambda;
    }

    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (H0(mid) > h0 ? lo : hi) = mid;
    }
    const double kappa = 0.5 * (lo + hi);
    if (std::abs(H0(kappa) - h0) > 1e-10)
        throw OutOfFamilyError("kappa_of_surface_height: root refinement failed");
    return kappa;
}

void write_profile_table(const LaminarProfile& p, std::ostream& os) {
    os << "# s  H  H_s  Gamma  gamma\n" << std::setprecision(17);
    const int n = static_cast<int>(p.s.size());
    for (int j = 0; j < n; ++j) {
        const double g = p.gamma[std::min(j, p.n_cells() - 1)];
        os << p.s[j] << ' ' << p.H[j] << ' ' << p.Hs[j] << ' ' << p.Gamma[j] << ' ' << g
           << '\n';
    }
}

}  // namespace solwave
