// Command-line driver for the solitary-wave solver.
//
// Subcommands:
//   profile      background shear profile table + critical values
//   spectrum     transverse eigenvalues at a given (or critical) mu
//   solve        single Newton solve from the small-amplitude seed
//   continue     full branch continuation with artifact export
//   reconstruct  Eulerian fields from a saved binary height field

#include <CLI11.hpp>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>

#include "solwave/continuation.hpp"
#include "solwave/diagnostics.hpp"
#include "solwave/driver_io.hpp"
#include "solwave/errors.hpp"
#include "solwave/field_reconstruction.hpp"
#include "solwave/height_solver.hpp"
#include "solwave/small_amplitude.hpp"
#include "solwave/sturm_liouville.hpp"

namespace {

using namespace solwave;

// Every RunConfig key is mirrored as a flag on each subcommand so a config
// file can be overridden piecemeal.
void add_config_flags(CLI::App* cmd, RunConfig& c) {
    cmd->add_option("--preset", c.preset,
                    "irrotational | two-layer | three-layer | custom");
    cmd->add_option("--breakpoints", c.breakpoints, "custom shear: 'y:u, y:u, ...'");
    cmd->add_option("--depth", c.depth, "still-water depth");
    cmd->add_option("--gravity", c.gravity, "gravitational acceleration");
    cmd->add_option("--wave-speed", c.wave_speed, "dimensional wave speed");
    cmd->add_option("--n-s", c.n_s, "vertical cells");
    cmd->add_option("--n-r", c.n_r, "horizontal cells (0 = auto)");
    cmd->add_option("--L", c.L, "half-strip length (0 = auto)");
    cmd->add_option("--dr", c.dr, "target r spacing for auto n-r");
    cmd->add_option("--grading", c.grading, "r grading exponent (1 = uniform)");
    cmd->add_option("--seed-eps", c.seed_eps, "seed amplitude parameter");
    cmd->add_option("--ds0", c.ds0, "initial arclength step");
    cmd->add_option("--ds-min", c.ds_min, "arclength step floor");
    cmd->add_option("--ds-max", c.ds_max, "arclength step cap");
    cmd->add_option("--tau", c.tau, "stagnation stop threshold on min(c-u)");
    cmd->add_option("--max-points", c.max_points, "branch point budget");
    cmd->add_option("--newton-tol", c.newton_tol, "Newton residual tolerance");
    cmd->add_option("--newton-max-iter", c.newton_max_iter, "Newton iteration cap");
    cmd->add_option("--stagnation-floor", c.stagnation_floor,
                    "hard floor on phi_s + H_s");
    cmd->add_option("--decay-threshold", c.decay_threshold,
                    "tail ratio triggering domain extension");
    cmd->add_option("--holder-alpha", c.holder_alpha, "Holder exponent in (0, 0.5]");
    cmd->add_option("--sobolev-p", c.sobolev_p, "Sobolev exponent (>= 1)");
    cmd->add_option("--mu", c.mu, "spectrum parameter (0 = critical)");
    cmd->add_option("--spectrum-k", c.spectrum_k, "eigenvalue count");
    cmd->add_option("--eps-a", c.eps_a, "auxiliary shift (< 0 = auto ladder)");
    cmd->add_option("--out-dir", c.out_dir, "output directory");
    cmd->add_flag("--dry-run", c.dry_run, "stop after profile/spectrum stage");
}

std::shared_ptr<const LaminarProfile> make_profile(const RunConfig& c) {
    c.validate();
    return std::make_shared<const LaminarProfile>(build_profile(make_current(c), c.n_s));
}

int cmd_profile(const RunConfig& c) {
    auto p = make_profile(c);
    write_profile_table(*p, std::cout);
    const CriticalFroude cf = critical_froude(*p);
    std::cout << std::setprecision(17) << "# lambda " << p->lambda << " mu_cr "
              << cf.mu_cr << " F_cr " << cf.F_cr << " c_nd " << p->c_nd << '\n';
    return 0;
}

int cmd_spectrum(const RunConfig& c) {
    auto p = make_profile(c);
    const double mu_used = c.mu > 0.0 ? c.mu : p->mu_cr;
    const SpectrumReport rep = eigenvalues(*p, mu_used, c.spectrum_k);
    write_spectrum_table(rep, std::cout);
    if (c.seed_eps < p->mu_cr) {
        const double F = froude_from_epsilon(*p, c.seed_eps);
        const AuxiliaryPhiReport aux = c.eps_a >= 0.0 ? auxiliary_phi(*p, F, c.eps_a)
                                                      : auxiliary_phi_auto(*p, F);
        std::cout << std::setprecision(17) << "# auxiliary eps_a " << aux.eps_a
                  << " positivity " << (aux.positivity_ok ? "pass" : "fail")
                  << " boundary_sign " << (aux.boundary_sign_ok ? "pass" : "fail")
                  << " boundary_value " << aux.boundary_value << '\n';
    }
    return 0;
}

int cmd_solve(const RunConfig& c) {
    auto p = make_profile(c);
    const KdvScaling k = kdv_scaling(*p);
    const double L = c.L > 0.0 ? c.L : recommended_length(k, c.seed_eps);
    const int nr = c.n_r > 0 ? c.n_r : std::max(60, static_cast<int>(L / c.dr) + 1);
    const Grid grid = Grid::graded(L, nr, p->n_cells(), c.grading);
    const double F = froude_from_epsilon(*p, c.seed_eps);

    SolverOptions opts;
    opts.tol = c.newton_tol;
    opts.max_iter = c.newton_max_iter;
    opts.stagnation_floor = c.stagnation_floor;

    HeightField guess = initial_guess(p, c.seed_eps, grid);
    NewtonReport rep;
    HeightField sol = newton_solve(guess, F, opts, &rep);

    const DiagnosticsReport diag = diagnose(sol, F);
    std::cout << std::setprecision(17) << "# converged in " << rep.iterations
              << " iterations, final residual " << rep.residual_history.back()
              << "\n# F " << F << " crest " << sol.at(0, grid.ns)
              << " flow_force_spread " << diag.flow_force_spread << '\n';

    const std::filesystem::path dir = resolve_out_dir(c);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::exists(dir))
        throw IoError("cannot create output directory: " + dir.string());
    {
        std::ofstream os(dir / "field.txt");
        if (!os) throw IoError("cannot write field.txt");
        write_field_text(sol, F, os);
    }
    {
        std::ofstream os(dir / "field.bin", std::ios::binary);
        if (!os) throw IoError("cannot write field.bin");
        write_field_binary(sol, F, os);
    }
    {
        std::ofstream os(dir / "diagnostics.txt");
        if (!os) throw IoError("cannot write diagnostics.txt");
        write_diagnostics(diag, os);
    }
    return 0;
}

int cmd_reconstruct(const RunConfig& c, const std::string& field_path) {
    auto p = make_profile(c);
    std::ifstream is(field_path, std::ios::binary);
    if (!is) throw IoError("cannot open field file: " + field_path);
    double F = 0.0;
    HeightField f = read_field_binary(p, is, &F);

    EulerianFields e = to_eulerian(f, F);
    pressure_field(e);
    const BoundCheckReport bounds = bound_checks(e, *p, F);
    const RoundtripReport rt = roundtrip(e);

    const std::filesystem::path dir = resolve_out_dir(c);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::exists(dir))
        throw IoError("cannot create output directory: " + dir.string());
    {
        std::ofstream os(dir / "eulerian.txt");
        if (!os) throw IoError("cannot write eulerian.txt");
        write_eulerian(e, os);
    }
    {
        std::ofstream os(dir / "surface.txt");
        if (!os) throw IoError("cannot write surface.txt");
        write_surface(e, os);
    }
    std::cout << std::setprecision(17) << "# F " << F << " pressure_bound_min "
              << bounds.pressure_bound_min << " velocity_bound_slack "
              << bounds.velocity_bound_slack << " bounds "
              << flag_name(bounds.flag) << "\n# roundtrip_error " << rt.error_sup
              << " tol_interp " << rt.tol_interp << ' '
              << (rt.error_sup <= rt.tol_interp ? "pass" : "fail") << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady solitary water waves over shear: solver and diagnostics"};
    app.require_subcommand(1);

    // --config is parsed in a pre-pass so flag overrides land on top of the
    // loaded file rather than on defaults.
    RunConfig cfg;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--config") == 0 || std::strcmp(argv[i], "-c") == 0) {
            if (i + 1 >= argc) {
                std::cerr << "error: --config requires a path\n";
                return 2;
            }
            try {
                cfg = solwave::load_config(argv[i + 1]);
            } catch (const solwave::SolwaveError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
        }
    }

    std::string config_path, field_path;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "key=value config file");
        add_config_flags(cmd, cfg);
        return cmd;
    };
    CLI::App* profile = add_common(app.add_subcommand("profile", "background profile"));
    CLI::App* spectrum = add_common(app.add_subcommand("spectrum", "eigenvalue scan"));
    CLI::App* solve = add_common(app.add_subcommand("solve", "single seeded solve"));
    CLI::App* cont = add_common(app.add_subcommand("continue", "branch continuation"));
    CLI::App* recon =
        add_common(app.add_subcommand("reconstruct", "Eulerian reconstruction"));
    recon->add_option("--field", field_path, "binary height-field file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (profile->parsed()) return cmd_profile(cfg);
        if (spectrum->parsed()) return cmd_spectrum(cfg);
        if (solve->parsed()) return cmd_solve(cfg);
        if (cont->parsed()) return solwave::run(cfg);
        if (recon->parsed()) return cmd_reconstruct(cfg, field_path);
    } catch (const solwave::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const solwave::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const solwave::ContinuationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const solwave::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const solwave::SolwaveError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
