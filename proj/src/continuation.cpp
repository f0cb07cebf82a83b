#include "solwave/continuation.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "solwave/field_reconstruction.hpp"
#include "solwave/small_amplitude.hpp"

namespace solwave {

namespace {

// Weighted inner product on (phi, F): the phi block is averaged so the F
// component keeps O(1) influence regardless of grid size.
double dot_pf(const Eigen::VectorXd& a, double aF, const Eigen::VectorXd& b, double bF) {
    return a.dot(b) / static_cast<double>(a.size()) + aF * bF;
}

// Two-solve bordering: given LU(J), rhs r and column Fcol, solve
// J dphi + Fcol dF = r,  <t, (dphi,dF)> = c.
void bordered_solve(
    const Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>& lu,
    const Eigen::VectorXd& r, const Eigen::VectorXd& fcol, const BranchTangent& t,
    double c, Eigen::VectorXd& dphi, double& dF) {
    const Eigen::VectorXd a = lu.solve(r);
    const Eigen::VectorXd b = lu.solve(fcol);
    const double n = static_cast<double>(a.size());
    const double denom = t.dF - t.dphi.dot(b) / n;
    if (std::abs(denom) < 1e-300) throw ContinuationError("bordered system is singular");
    dF = (c - t.dphi.dot(a) / n) / denom;
    dphi = a - dF * b;
}

double holder_quotient_1d(const std::vector<double>& g, const std::vector<double>& x,
                          double alpha) {
    double q = 0.0;
    const int n = static_cast<int>(g.size());
    for (int sep = 1; sep < n; sep *= 2)
        for (int i = 0; i + sep < n; ++i) {
            const double dist = std::abs(x[i + sep] - x[i]);
            if (dist > 0.0)
                q = std::max(q, std::abs(g[i + sep] - g[i]) / std::pow(dist, alpha));
        }
    return q;
}

}  // namespace

const char* termination_name(TerminationReason r) {
    switch (r) {
        case TerminationReason::stagnation_threshold: return "stagnation-threshold";
        case TerminationReason::step_floor: return "step-floor";
        case TerminationReason::budget: return "budget";
        default: return "divergence";
    }
}

double blowup_quantity(const HeightField& f, double F, double alpha, double p) {
    const LaminarProfile& prof = *f.profile;
    const int nr = f.grid.nr, ns = f.grid.ns;

    // Cell gradients + stagnation measure.
    double sup_phi = f.max_abs(), sup_grad = 0.0, min_m = 1e300;
    std::vector<std::vector<double>> gr(nr + 1, std::vector<double>(ns + 1, 0.0));
    std::vector<std::vector<double>> gs(nr + 1, std::vector<double>(ns + 1, 0.0));
    for (int i = 0; i < nr; ++i) {
        const double dri = f.grid.dr(i);
        for (int j = 0; j < ns; ++j) {
            const double ds = prof.ds(j);
            const double pr = (f.at(i + 1, j) + f.at(i + 1, j + 1) - f.at(i, j) -
                               f.at(i, j + 1)) /
                              (2.0 * dri);
            const double ps = (f.at(i, j + 1) + f.at(i + 1, j + 1) - f.at(i, j) -
                               f.at(i + 1, j)) /
                              (2.0 * ds);
            sup_grad = std::max(sup_grad, std::abs(pr) + std::abs(ps));
            min_m = std::min(min_m, (prof.H[j + 1] - prof.H[j]) / ds + ps);
        }
    }
    // Node gradients for the Hoelder quotient (dyadic separations per line).
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= ns; ++j) {
            const int il = std::max(0, i - 1), ih = std::min(nr, i + 1);
            gr[i][j] = (f.at(ih, j) - f.at(il, j)) / (f.grid.r[ih] - f.grid.r[il]);
            const int jl = std::max(0, j - 1), jh = std::min(ns, j + 1);
            gs[i][j] = (f.at(i, jh) - f.at(i, jl)) / (prof.s[jh] - prof.s[jl]);
        }
    double holder = 0.0;
    std::vector<double> line(nr + 1);
    for (int j = 0; j <= ns; ++j) {
        for (int i = 0; i <= nr; ++i) line[i] = gr[i][j];
        holder = std::max(holder, holder_quotient_1d(line, f.grid.r, alpha));
        for (int i = 0; i <= nr; ++i) line[i] = gs[i][j];
        holder = std::max(holder, holder_quotient_1d(line, f.grid.r, alpha));
    }
    std::vector<double> col(ns + 1);
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j <= ns; ++j) col[j] = gr[i][j];
        holder = std::max(holder, holder_quotient_1d(col, prof.s, alpha));
        for (int j = 0; j <= ns; ++j) col[j] = gs[i][j];
        holder = std::max(holder, holder_quotient_1d(col, prof.s, alpha));
    }

    // W^{2,p} proxy on the central window |r| <= 2.
    double w2p = 0.0;
    for (int i = 1; i < nr; ++i) {
        if (f.grid.r[i] > 2.0) break;
        const double dr = f.grid.dr(i - 1);
        for (int j = 1; j < ns; ++j) {
            const double dsm = prof.ds(j - 1), dsp = prof.ds(j);
            const double drr =
                (f.at(i + 1, j) - 2.0 * f.at(i, j) + f.at(i - 1, j)) / (dr * dr);
            const double dss = 2.0 *
                               ((f.at(i, j + 1) - f.at(i, j)) / dsp -
                                (f.at(i, j) - f.at(i, j - 1)) / dsm) /
                               (dsm + dsp);
            const double drs = (f.at(i + 1, j + 1) - f.at(i + 1, j - 1) -
                                f.at(i - 1, j + 1) + f.at(i - 1, j - 1)) /
                               (2.0 * dr * (prof.s[j + 1] - prof.s[j - 1]));
            const double area = dr * 0.5 * (dsm + dsp);
            w2p += (std::pow(std::abs(drr), p) + 2.0 * std::pow(std::abs(drs), p) +
                    std::pow(std::abs(dss), p)) *
                   area;
        }
    }
    w2p = std::pow(w2p, 1.0 / p);

    const double F_cr = critical_froude(prof).F_cr;
    if (const char* dbg = std::getenv("SOLWAVE_DEBUG"))
        if (*dbg)
            std::fprintf(stderr,
                         "N terms: sup %.3g grad %.3g holder %.3g w2p %.3g invm %.3g "
                         "F %.3g invFF %.3g\n",
                         sup_phi, sup_grad, holder, w2p, 1.0 / min_m, F,
                         1.0 / (F - F_cr));
    return sup_phi + sup_grad + holder + w2p + 1.0 / min_m + F + 1.0 / (F - F_cr);
}

BranchTangent tangent(const HeightField& f, double F, const SolverOptions& opts,
                      const BranchTangent& prev) {
    const Eigen::SparseMatrix<double> J = jacobian(f, F, opts);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
        throw ContinuationError("tangent: singular Jacobian factorization");
    const Eigen::VectorXd fcol = residual_dF(f, F);

    BranchTangent t;
    bordered_solve(lu, Eigen::VectorXd::Zero(f.n_nodes()), fcol, prev, 1.0, t.dphi, t.dF);
    const double nrm = std::sqrt(dot_pf(t.dphi, t.dF, t.dphi, t.dF));
    t.dphi /= nrm;
    t.dF /= nrm;
    if (dot_pf(t.dphi, t.dF, prev.dphi, prev.dF) < 0.0) {
        t.dphi = -t.dphi;
        t.dF = -t.dF;
    }
    return t;
}

StepResult step(const HeightField& f, double F, const BranchTangent& tan, double ds,
                const SolverOptions& opts, int corrector_max_iter) {
    if (ds == 0.0) return {f, F};
    // Euler predictor.
    HeightField x = f;
    for (int k = 0; k < x.n_nodes(); ++k) x.phi[k] += ds * tan.dphi[k];
    double Fx = F + ds * tan.dF;

    const Eigen::VectorXd phi0 = Eigen::Map<const Eigen::VectorXd>(
        f.phi.data(), static_cast<Eigen::Index>(f.phi.size()));

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    for (int it = 0; it < corrector_max_iter; ++it) {
        Eigen::VectorXd R;
        if (!try_residual(x, Fx, opts, R))
            throw ContinuationError("step: corrector hit the stagnation floor");
        const Eigen::VectorXd phix =
            Eigen::Map<const Eigen::VectorXd>(x.phi.data(), phi0.size());
        const double c =
            dot_pf(phix - phi0, Fx - F, tan.dphi, tan.dF) - ds;  // arclength residual
        const double rn = R.lpNorm<Eigen::Infinity>();
        if (rn <= opts.tol && std::abs(c) <= 1e-10 * std::max(1.0, ds)) return {x, Fx};

        lu.compute(jacobian(x, Fx, opts));
        if (lu.info() != Eigen::Success)
            throw ContinuationError("step: singular Jacobian factorization");
        Eigen::VectorXd dphi;
        double dF = 0.0;
        bordered_solve(lu, -R, residual_dF(x, Fx), tan, -c, dphi, dF);
        for (int k = 0; k < x.n_nodes(); ++k) x.phi[k] += dphi[k];
        Fx += dF;
        if (!(Fx > 0.0)) throw ContinuationError("step: corrector drove F <= 0");
    }
    throw ContinuationError("step: corrector did not converge");
}

Branch run_branch(std::shared_ptr<const LaminarProfile> profile, double seed_eps,
                  const ContinuationOptions& opts) {
    Branch branch;
    const KdvScaling scal = kdv_scaling(*profile);

    // Grid: auto length from the seed decay unless overridden.
    double L = opts.L > 0.0 ? opts.L : recommended_length(scal, seed_eps);
    int nr = opts.nr > 0 ? opts.nr
                         : std::max(60, static_cast<int>(std::ceil(L / opts.dr_target)));
    Grid grid = Grid::graded(L, nr, profile->n_cells(), opts.grading);

    auto finish_point = [&](HeightField&& f, double F, double t) {
        BranchPoint pt;
        pt.field = std::move(f);
        pt.F = F;
        pt.t = t;
        pt.diag = diagnose(pt.field, F);
        if (opts.with_bound_checks) {
            try {
                EulerianFields e = to_eulerian(pt.field, F);
                pressure_field(e);
                const BoundCheckReport b = bound_checks(e, *pt.field.profile, F);
                pt.diag.pressure_bound_min = b.pressure_bound_min;
                pt.diag.velocity_bound_slack = b.velocity_bound_slack;
                pt.diag.pressure_velocity_bounds = b.flag;
            } catch (const SolwaveError&) {
                pt.diag.pressure_velocity_bounds = Flag::not_applicable;
            }
        }
        pt.N = blowup_quantity(pt.field, F, opts.holder_alpha, opts.sobolev_p);
        branch.points.push_back(std::move(pt));
    };

    // Node-level admissibility: the per-cell floor is enforced by the
    // corrector, but the Eulerian maps also need h_s > 0 at nodes (central
    // differences), so reject iterates that oscillate through zero there.
    auto node_slope_min = [&profile](const HeightField& f) {
        const std::vector<double>& s = profile->s;
        const std::vector<double>& H = profile->H;
        const int ns = f.grid.ns;
        double mn = 1e300;
        for (int i = 0; i <= f.grid.nr; ++i)
            for (int j = 0; j <= ns; ++j) {
                const int jl = std::max(0, j - 1), jh = std::min(ns, j + 1);
                const double hs = (H[jh] + f.at(i, jh) - H[jl] - f.at(i, jl)) /
                                  (s[jh] - s[jl]);
                mn = std::min(mn, hs);
            }
        return mn;
    };

    // Seed solve.
    double F = froude_from_epsilon(*profile, seed_eps);
    HeightField field = HeightField::zero(profile, grid);
    try {
        // The seed only has to land in Newton's basin, so accept amplitudes
        // beyond the strict asymptotic range; divergence is caught below.
        const HeightField guess = initial_guess(profile, seed_eps, grid, 0.25);
        field = newton_solve(guess, F, opts.newton);
    } catch (const SolwaveError&) {
        branch.reason = TerminationReason::divergence;
        return branch;  // divergence at the seed; no points
    }
    finish_point(std::move(field), F, 0.0);

    BranchTangent prev;
    prev.dphi = Eigen::VectorXd::Zero(branch.points.back().field.n_nodes());
    prev.dF = 1.0;  // F initially increases along the branch

    double ds = opts.ds0;
    while (true) {
        BranchPoint& cur = branch.points.back();
        if (cur.diag.min_cu <= opts.tau) {
            branch.reason = TerminationReason::stagnation_threshold;
            break;
        }
        if (static_cast<int>(branch.points.size()) >= opts.max_points) {
            branch.reason = TerminationReason::budget;
            break;
        }

        BranchTangent tan;
        try {
            tan = tangent(cur.field, cur.F, opts.newton, prev);
        } catch (const SolwaveError&) {
            branch.reason = TerminationReason::divergence;
            break;
        }

        bool stepped = false;
        while (!stepped) {
            StepResult next;
            try {
                next = step(cur.field, cur.F, tan, ds, opts.newton,
                            opts.corrector_max_iter);
                if (node_slope_min(next.field) <= opts.newton.stagnation_floor)
                    throw ContinuationError("step: iterate lost nodal slope positivity");
                // Keep the far field decayed; widen the strip when needed.
                if (decay_check(next.field) > opts.decay_threshold) {
                    const double newL = next.field.grid.L * opts.extend_factor;
                    next.field = extend_domain(next.field, next.F, newL, opts.newton);
                }
            } catch (const SolwaveError& e) {
                if (const char* dbg = std::getenv("SOLWAVE_DEBUG"))
                    if (*dbg) std::fprintf(stderr, "step retry: %s\n", e.what());
                ds *= 0.5;
                if (ds < opts.ds_min) {
                    branch.reason = TerminationReason::step_floor;
                    break;
                }
                continue;
            }
            // Past this line nothing may throw back into the retry loop: the
            // tangent is re-sized to the (possibly extended) accepted field.
            if (next.field.n_nodes() != static_cast<int>(tan.dphi.size())) {
                Eigen::VectorXd padded = Eigen::VectorXd::Zero(next.field.n_nodes());
                padded.head(tan.dphi.size()) = tan.dphi;
                tan.dphi = std::move(padded);
            }
            finish_point(std::move(next.field), next.F, cur.t + ds);
            stepped = true;
        }
        if (!stepped) break;
        prev = tan;
        ds = std::min(ds * opts.ds_grow, opts.ds_max);
    }
    return branch;
}

void write_branch_table(const Branch& b, const LaminarProfile& p, std::ostream& os) {
    os << "# t F eps_equiv crest_h max_hs min_hs flow_force_spread N elevation "
          "monotone froude_bound bounds\n"
       << std::setprecision(12);
    for (const BranchPoint& pt : b.points) {
        const double crest = 1.0 + pt.field.at(0, pt.field.grid.ns);
        os << pt.t << ' ' << pt.F << ' ' << p.mu_cr - 1.0 / (pt.F * pt.F) << ' ' << crest
           << ' ' << pt.diag.max_hs << ' ' << pt.diag.min_hs << ' '
           << pt.diag.flow_force_spread << ' ' << pt.N << ' '
           << flag_name(pt.diag.elevation) << ' ' << flag_name(pt.diag.monotone) << ' '
           << flag_name(pt.diag.froude_bound) << ' '
           << flag_name(pt.diag.pressure_velocity_bounds) << '\n';
    }
    os << "# termination: " << termination_name(b.reason) << '\n';
}

}  // namespace solwave
