#include "solwave/height_solver.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace solwave {

namespace {

constexpr char kFieldMagic[8] = {'S', 'O', 'L', 'W', 'H', 'F', '0', '1'};

struct CellGeom {
    // Per s-cell constants of the discretization.
    std::vector<double> ds, hs_d, gmid, c2, lambda_eff;
};

// w(m) = 1/m^2 + c2*m^2/4 is the cell's "1/h_s^2" consistent with the exact
// laminar average; Kcal(m) = -1/m + c2*m^3/12 plays the role of -1/h_s and is
// chosen so that dG1/dm = dG2/dphi_r (symmetric principal part).
inline double w_of(double m, double c2) { return 1.0 / (m * m) + 0.25 * c2 * m * m; }
inline double wp_of(double m, double c2) { return -2.0 / (m * m * m) + 0.5 * c2 * m; }
inline double kcal_of(double m, double c2) { return -1.0 / m + c2 * m * m * m / 12.0; }

CellGeom make_geom(const LaminarProfile& p) {
    CellGeom g;
    const int ns = p.n_cells();
    g.ds.resize(ns);
    g.hs_d.resize(ns);
    g.gmid.resize(ns);
    g.c2.resize(ns);
    g.lambda_eff.resize(ns);
    for (int j = 0; j < ns; ++j) {
        g.ds[j] = p.ds(j);
        g.hs_d[j] = (p.H[j + 1] - p.H[j]) / g.ds[j];
        g.gmid[j] = p.gamma_mid(j);
        const double gds = p.gamma[j] * g.ds[j];
        g.c2[j] = gds * gds;
        // Exact cell kappa of the unperturbed profile; equals lambda to
        // machine precision and makes phi == 0 an exact discrete solution.
        g.lambda_eff[j] = w_of(g.hs_d[j], g.c2[j]) - 2.0 * g.gmid[j];
    }
    return g;
}

struct Assembly {
    CellFluxes fx;
    bool ok = true;
    int bad_i = -1, bad_j = -1;  // first floor-violating cell
};

Assembly compute_fluxes(const HeightField& f, const CellGeom& g, double floor_val) {
    const int nr = f.grid.nr, ns = f.grid.ns;
    Assembly a;
    a.fx.phi_r.resize(nr * ns);
    a.fx.phi_s.resize(nr * ns);
    a.fx.m.resize(nr * ns);
    a.fx.g1.resize(nr * ns);
    a.fx.g2.resize(nr * ns);
    for (int i = 0; i < nr; ++i) {
        const double dri = f.grid.dr(i);
        for (int j = 0; j < ns; ++j) {
            const int c = i * ns + j;
            const double p00 = f.at(i, j), p01 = f.at(i, j + 1);
            const double p10 = f.at(i + 1, j), p11 = f.at(i + 1, j + 1);
            const double pr = (p10 + p11 - p00 - p01) / (2.0 * dri);
            const double ps = (p01 + p11 - p00 - p10) / (2.0 * g.ds[j]);
            const double m = g.hs_d[j] + ps;
            a.fx.phi_r[c] = pr;
            a.fx.phi_s[c] = ps;
            a.fx.m[c] = m;
            if (!(m > floor_val)) {
                if (a.ok) a.bad_i = i, a.bad_j = j;
                a.ok = false;
                continue;
            }
            const double w = w_of(m, g.c2[j]);
            a.fx.g1[c] = -pr * kcal_of(m, g.c2[j]);
            a.fx.g2[c] = 0.5 * (g.lambda_eff[j] + 2.0 * g.gmid[j] - (1.0 + pr * pr) * w);
        }
    }
    return a;
}

// Control-volume span of node i in r (half cells at the ends), same for s.
inline double span_r(const Grid& grid, int i) {
    double v = 0.0;
    if (i > 0) v += 0.5 * grid.dr(i - 1);
    if (i < grid.nr) v += 0.5 * grid.dr(i);
    return v;
}
inline double span_s(const CellGeom& g, int ns, int j) {
    double v = 0.0;
    if (j > 0) v += 0.5 * g.ds[j - 1];
    if (j < ns) v += 0.5 * g.ds[j];
    return v;
}

inline bool dirichlet_row(const Grid& grid, int i, int j) {
    return j == 0 || i == grid.nr;
}

Eigen::VectorXd assemble_residual(const HeightField& f, double F, const CellGeom& g,
                                  const Assembly& a) {
    const int nr = f.grid.nr, ns = f.grid.ns;
    const int stride = ns + 1;
    Eigen::VectorXd R = Eigen::VectorXd::Zero(f.n_nodes());

    // Flux divergence, cell by cell.
    for (int i = 0; i < nr; ++i) {
        const double dri = f.grid.dr(i);
        for (int j = 0; j < ns; ++j) {
            const int c = i * ns + j;
            const double g1w = a.fx.g1[c] * 0.5 * g.ds[j];
            const double g2w = a.fx.g2[c] * 0.5 * dri;
            // East faces of west nodes (+), west faces of east nodes (-).
            R[i * stride + j] += g1w;
            R[i * stride + j + 1] += g1w;
            R[(i + 1) * stride + j] -= g1w;
            R[(i + 1) * stride + j + 1] -= g1w;
            // North faces of south nodes (+), south faces of north nodes (-).
            R[i * stride + j] += g2w;
            R[(i + 1) * stride + j] += g2w;
            R[i * stride + j + 1] -= g2w;
            R[(i + 1) * stride + j + 1] -= g2w;
        }
    }
    // Robin closure on the surface: outgoing flux G2 = phi/F^2.
    for (int i = 0; i <= nr; ++i)
        R[i * stride + ns] += f.at(i, ns) / (F * F) * span_r(f.grid, i);

    // Scale by control areas; overwrite Dirichlet rows.
    for (int i = 0; i <= nr; ++i) {
        const double wr = span_r(f.grid, i);
        for (int j = 0; j <= ns; ++j) {
            const int row = i * stride + j;
            if (dirichlet_row(f.grid, i, j))
                R[row] = f.at(i, j);
            else
                R[row] /= wr * span_s(g, ns, j);
        }
    }
    return R;
}

}  // namespace

Grid Grid::uniform(double L, int nr, int ns) { return graded(L, nr, ns, 1.0); }

Grid Grid::graded(double L, int nr, int ns, double grading) {
    if (!(L > 0.0) || nr < 8 || ns < 8)
        throw ConfigError("Grid: need L > 0 and nr, ns >= 8");
    if (!(grading > 0.0)) throw ConfigError("Grid: grading must be > 0");
    Grid g;
    g.L = L;
    g.nr = nr;
    g.ns = ns;
    g.r.resize(nr + 1);
    for (int i = 0; i <= nr; ++i)
        g.r[i] = grading == 1.0 ? L * i / nr
                                : L * std::pow(static_cast<double>(i) / nr, grading);
    return g;
}

HeightField HeightField::zero(std::shared_ptr<const LaminarProfile> profile, Grid grid) {
    if (grid.ns != profile->n_cells())
        throw ConfigError("HeightField: grid ns must match the profile cell count");
    HeightField f;
    f.profile = std::move(profile);
    f.grid = std::move(grid);
    f.phi.assign(f.n_nodes(), 0.0);
    return f;
}

double HeightField::max_abs() const {
    double m = 0.0;
    for (double v : phi) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> HeightField::surface_height() const {
    std::vector<double> h(grid.nr + 1);
    for (int i = 0; i <= grid.nr; ++i) h[i] = 1.0 + at(i, grid.ns);
    return h;
}

double cell_kappa(const LaminarProfile& p, int j, double m) {
    const double ds = p.ds(j);
    const double gds = p.gamma[j] * ds;
    return 1.0 / (m * m) + 0.25 * gds * gds * m * m - 2.0 * p.gamma_mid(j);
}

Eigen::VectorXd residual(const HeightField& f, double F, const SolverOptions& opts,
                         CellFluxes* fluxes) {
    const CellGeom g = make_geom(*f.profile);
    Assembly a = compute_fluxes(f, g, opts.stagnation_floor);
    if (!a.ok) {
        std::ostringstream msg;
        msg << "stagnation floor violated at cell (i=" << a.bad_i << ", j=" << a.bad_j
            << "): phi_s + H_s = " << a.fx.m[a.bad_i * f.grid.ns + a.bad_j];
        throw StagnationError(msg.str());
    }
    Eigen::VectorXd R = assemble_residual(f, F, g, a);
    if (fluxes) *fluxes = std::move(a.fx);
    return R;
}

bool try_residual(const HeightField& f, double F, const SolverOptions& opts,
                  Eigen::VectorXd& out) {
    const CellGeom g = make_geom(*f.profile);
    const Assembly a = compute_fluxes(f, g, opts.stagnation_floor);
    if (!a.ok) return false;
    out = assemble_residual(f, F, g, a);
    return true;
}

Eigen::SparseMatrix<double> jacobian(const HeightField& f, double F,
                                     const SolverOptions& opts) {
    const CellGeom g = make_geom(*f.profile);
    const Assembly a = compute_fluxes(f, g, opts.stagnation_floor);
    if (!a.ok) throw StagnationError("jacobian: stagnation floor violated");

    const int nr = f.grid.nr, ns = f.grid.ns;
    const int stride = ns + 1;
    const int n = f.n_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * 10);

    // Precompute node control areas (1 for Dirichlet rows).
    std::vector<double> inv_area(n, 1.0);
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= ns; ++j)
            if (!dirichlet_row(f.grid, i, j))
                inv_area[i * stride + j] = 1.0 / (span_r(f.grid, i) * span_s(g, ns, j));

    for (int i = 0; i < nr; ++i) {
        const double dri = f.grid.dr(i);
        for (int j = 0; j < ns; ++j) {
            const int c = i * ns + j;
            const double pr = a.fx.phi_r[c], m = a.fx.m[c];
            const double w = w_of(m, g.c2[j]);
            const double dG1dr = -kcal_of(m, g.c2[j]);
            const double dG1dm = -pr * w;
            const double dG2dr = -pr * w;
            const double dG2dm = -0.5 * (1.0 + pr * pr) * wp_of(m, g.c2[j]);

            // Corner nodes and their gradient weights.
            const int corner[4] = {i * stride + j, i * stride + j + 1,
                                   (i + 1) * stride + j, (i + 1) * stride + j + 1};
            const double gr[4] = {-1.0 / (2.0 * dri), -1.0 / (2.0 * dri),
                                  1.0 / (2.0 * dri), 1.0 / (2.0 * dri)};
            const double gs[4] = {-1.0 / (2.0 * g.ds[j]), 1.0 / (2.0 * g.ds[j]),
                                  -1.0 / (2.0 * g.ds[j]), 1.0 / (2.0 * g.ds[j])};

            // Geometric distribution weights, matching assemble_residual.
            const double w1 = 0.5 * g.ds[j], w2 = 0.5 * dri;
            const int tgt[8] = {corner[0], corner[1], corner[2], corner[3],
                                corner[0], corner[2], corner[1], corner[3]};
            const double tw[8] = {w1, w1, -w1, -w1, w2, w2, -w2, -w2};
            const bool is_g1[8] = {true, true, true, true, false, false, false, false};

            for (int t = 0; t < 8; ++t) {
                const int row = tgt[t];
                const int ri = row / stride, rj = row % stride;
                if (dirichlet_row(f.grid, ri, rj)) continue;
                for (int kcorner = 0; kcorner < 4; ++kcorner) {
                    const double dflux =
                        is_g1[t] ? dG1dr * gr[kcorner] + dG1dm * gs[kcorner]
                                 : dG2dr * gr[kcorner] + dG2dm * gs[kcorner];
                    trip.emplace_back(row, corner[kcorner], tw[t] * dflux * inv_area[row]);
                }
            }
        }
    }

    // Robin flux derivative on the surface rows.
    for (int i = 0; i < nr; ++i) {
        const int row = i * stride + ns;
        trip.emplace_back(row, row, span_r(f.grid, i) / (F * F) * inv_area[row]);
    }
    // Dirichlet rows.
    for (int i = 0; i <= nr; ++i)
        for (int j = 0; j <= ns; ++j)
            if (dirichlet_row(f.grid, i, j)) {
                const int row = i * stride + j;
                trip.emplace_back(row, row, 1.0);
            }

    Eigen::SparseMatrix<double> J(n, n);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
}

Eigen::VectorXd residual_dF(const HeightField& f, double F) {
    const CellGeom g = make_geom(*f.profile);
    const int nr = f.grid.nr, ns = f.grid.ns;
    const int stride = ns + 1;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(f.n_nodes());
    for (int i = 0; i < nr; ++i) {
        const int row = i * stride + ns;
        const double inv_area = 1.0 / (span_r(f.grid, i) * span_s(g, ns, ns));
        d[row] = -2.0 / (F * F * F) * f.at(i, ns) * span_r(f.grid, i) * inv_area;
    }
    return d;
}

HeightField newton_solve(const HeightField& guess, double F, const SolverOptions& opts,
                         NewtonReport* report) {
    HeightField x = guess;
    Eigen::VectorXd R;
    if (!try_residual(x, F, opts, R))
        throw StagnationError("newton_solve: initial guess violates the stagnation floor");
    double rn = R.lpNorm<Eigen::Infinity>();
    NewtonReport rep;
    rep.residual_history.push_back(rn);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    for (int it = 0; it < opts.max_iter && rn > opts.tol; ++it) {
        const Eigen::SparseMatrix<double> J = jacobian(x, F, opts);
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw ConvergenceError("newton_solve: singular Jacobian factorization");
        const Eigen::VectorXd step = lu.solve(-R);

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls <= 30; ++ls) {
            HeightField trial = x;
            for (int k = 0; k < trial.n_nodes(); ++k) trial.phi[k] += t * step[k];
            Eigen::VectorXd Rt;
            if (try_residual(trial, F, opts, Rt)) {
                const double rt = Rt.lpNorm<Eigen::Infinity>();
                if (rt < rn || !opts.backtracking || rt <= opts.tol) {
                    x = std::move(trial);
                    R = std::move(Rt);
                    rn = rt;
                    accepted = true;
                    break;
                }
            }
            if (!opts.backtracking) break;
            t *= 0.5;
        }
        if (!accepted)
            throw ConvergenceError("newton_solve: line search exhausted (residual " +
                                   std::to_string(rn) + ")");
        rep.residual_history.push_back(rn);
        rep.iterations = it + 1;
    }
    rep.converged = rn <= opts.tol;
    if (!rep.converged) {
        if (report) *report = rep;
        throw ConvergenceError("newton_solve: no convergence after " +
                               std::to_string(opts.max_iter) +
                               " iterations (residual " + std::to_string(rn) + ")");
    }
    if (report) *report = rep;
    return x;
}

double decay_check(const HeightField& f) {
    const double amp = f.max_abs();
    if (amp == 0.0) return 0.0;
    const int nr = f.grid.nr, ns = f.grid.ns;
    const int start = std::max(0, nr - std::max(1, nr / 10));
    double tail = 0.0;
    for (int i = start; i <= nr; ++i)
        for (int j = 0; j <= ns; ++j) tail = std::max(tail, std::abs(f.at(i, j)));
    return tail / amp;
}

HeightField extend_domain(const HeightField& f, double F, double newL,
                          const SolverOptions& opts) {
    if (newL <= f.grid.L) throw DomainError("extend_domain: new length must exceed old");
    const double dr = f.grid.dr(f.grid.nr - 1);  // pad with the outermost spacing
    const int add = static_cast<int>(std::ceil((newL - f.grid.L) / dr));
    Grid g;
    g.ns = f.grid.ns;
    g.nr = f.grid.nr + add;
    g.r = f.grid.r;
    for (int k = 1; k <= add; ++k) g.r.push_back(f.grid.L + k * dr);
    g.L = g.r.back();
    HeightField ext = HeightField::zero(f.profile, g);
    for (int i = 0; i <= f.grid.nr; ++i)
        for (int j = 0; j <= f.grid.ns; ++j) ext.at(i, j) = f.at(i, j);
    // Newly added columns stay zero (exponential tail); re-solve.
    return newton_solve(ext, F, opts);
}

void write_field_text(const HeightField& f, double F, std::ostream& os) {
    os << "# height field: r s phi\n";
    os << "# L=" << std::setprecision(17) << f.grid.L << " F=" << F << " nr=" << f.grid.nr
       << " ns=" << f.grid.ns << '\n';
    for (int i = 0; i <= f.grid.nr; ++i)
        for (int j = 0; j <= f.grid.ns; ++j)
            os << f.grid.r[i] << ' ' << f.profile->s[j] << ' ' << f.at(i, j) << '\n';
}

void write_field_binary(const HeightField& f, double F, std::ostream& os) {
    os.write(kFieldMagic, sizeof(kFieldMagic));
    const uint32_t nr = f.grid.nr, ns = f.grid.ns;
    os.write(reinterpret_cast<const char*>(&nr), 4);
    os.write(reinterpret_cast<const char*>(&ns), 4);
    os.write(reinterpret_cast<const char*>(&f.grid.L), 8);
    os.write(reinterpret_cast<const char*>(&F), 8);
    os.write(reinterpret_cast<const char*>(f.profile->s.data()),
             static_cast<std::streamsize>(8 * f.profile->s.size()));
    os.write(reinterpret_cast<const char*>(f.grid.r.data()),
             static_cast<std::streamsize>(8 * f.grid.r.size()));
    os.write(reinterpret_cast<const char*>(f.phi.data()),
             static_cast<std::streamsize>(8 * f.phi.size()));
    if (!os) throw IoError("write_field_binary: stream failure");
}

HeightField read_field_binary(std::shared_ptr<const LaminarProfile> profile,
                              std::istream& is, double* F) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kFieldMagic, 8) != 0)
        throw IoError("read_field_binary: bad magic");
    uint32_t nr = 0, ns = 0;
    double L = 0.0, Fv = 0.0;
    is.read(reinterpret_cast<char*>(&nr), 4);
    is.read(reinterpret_cast<char*>(&ns), 4);
    is.read(reinterpret_cast<char*>(&L), 8);
    is.read(reinterpret_cast<char*>(&Fv), 8);
    if (!is || ns != static_cast<uint32_t>(profile->n_cells()))
        throw IoError("read_field_binary: header does not match the profile");
    std::vector<double> snodes(ns + 1);
    is.read(reinterpret_cast<char*>(snodes.data()), 8 * (ns + 1));
    for (size_t j = 0; j < snodes.size(); ++j)
        if (std::abs(snodes[j] - profile->s[j]) > 1e-12)
            throw IoError("read_field_binary: s-grid mismatch with the profile");
    Grid g = Grid::uniform(L, nr, ns);
    is.read(reinterpret_cast<char*>(g.r.data()), 8 * (nr + 1));
    if (!is || g.r.front() != 0.0 || g.r.back() != L)
        throw IoError("read_field_binary: corrupt r-grid record");
    HeightField f = HeightField::zero(std::move(profile), std::move(g));
    is.read(reinterpret_cast<char*>(f.phi.data()),
            static_cast<std::streamsize>(8 * f.phi.size()));
    if (!is) throw IoError("read_field_binary: truncated payload");
    if (F) *F = Fv;
    return f;
}

}  // namespace solwave
