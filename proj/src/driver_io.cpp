#include "solwave/driver_io.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "solwave/field_reconstruction.hpp"
#include "solwave/small_amplitude.hpp"
#include "solwave/sturm_liouville.hpp"

namespace solwave {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key, int line) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": bad number for '" + key +
                          "': " + v);
    }
}

int to_int(const std::string& v, const std::string& key, int line) {
    const double x = to_double(v, key, line);
    const int i = static_cast<int>(x);
    if (i != x)
        throw ConfigError("line " + std::to_string(line) + ": '" + key +
                          "' must be an integer");
    return i;
}

bool to_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("line " + std::to_string(line) + ": '" + key +
                      "' must be true/false");
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw IoError("cannot open for writing: " + p.string());
    return os;
}

}  // namespace

void RunConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("config field '" + field + "': " + why);
    };
    if (preset != "irrotational" && preset != "two-layer" && preset != "three-layer" &&
        preset != "custom")
        fail("preset", "unknown preset '" + preset + "'");
    if (preset == "custom" && breakpoints.empty())
        fail("breakpoints", "required for preset=custom");
    if (!(depth > 0.0)) fail("depth", "must be > 0");
    if (!(gravity > 0.0)) fail("gravity", "must be > 0");
    if (!(wave_speed > 0.0)) fail("wave_speed", "must be > 0");
    if (n_s < 16) fail("n_s", "must be >= 16");
    if (n_r != 0 && n_r < 8) fail("n_r", "must be 0 (auto) or >= 8");
    if (L < 0.0) fail("L", "must be >= 0 (0 = auto)");
    if (!(dr > 0.0)) fail("dr", "must be > 0");
    if (!(grading > 0.0)) fail("grading", "must be > 0");
    if (!(seed_eps > 0.0)) fail("seed_eps", "must be > 0");
    if (!(ds0 > 0.0) || !(ds_min > 0.0) || !(ds_max >= ds_min))
        fail("ds0/ds_min/ds_max", "must be positive with ds_max >= ds_min");
    if (!(tau > 0.0 && tau < 1.0)) fail("tau", "must lie in (0,1)");
    if (max_points < 1) fail("max_points", "must be >= 1");
    if (!(newton_tol > 0.0)) fail("newton_tol", "must be > 0");
    if (newton_max_iter < 1) fail("newton_max_iter", "must be >= 1");
    if (!(stagnation_floor > 0.0)) fail("stagnation_floor", "must be > 0");
    if (!(decay_threshold > 0.0)) fail("decay_threshold", "must be > 0");
    if (!(holder_alpha > 0.0 && holder_alpha <= 0.5))
        fail("holder_alpha", "must lie in (0, 0.5]");
    if (!(sobolev_p >= 1.0)) fail("sobolev_p", "must be >= 1");
    if (mu < 0.0) fail("mu", "must be >= 0 (0 = mu_cr)");
    if (spectrum_k < 1) fail("spectrum_k", "must be >= 1");
    if (out_dir.empty()) fail("out_dir", "must be nonempty");
}

RunConfig parse_config(std::istream& is, const std::string& name) {
    RunConfig c;
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + " line " + std::to_string(line) +
                              ": expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));

        if (key == "preset") c.preset = val;
        else if (key == "breakpoints") c.breakpoints = val;
        else if (key == "depth") c.depth = to_double(val, key, line);
        else if (key == "gravity") c.gravity = to_double(val, key, line);
        else if (key == "wave_speed") c.wave_speed = to_double(val, key, line);
        else if (key == "n_s") c.n_s = to_int(val, key, line);
        else if (key == "n_r") c.n_r = to_int(val, key, line);
        else if (key == "L") c.L = to_double(val, key, line);
        else if (key == "dr") c.dr = to_double(val, key, line);
        else if (key == "grading") c.grading = to_double(val, key, line);
        else if (key == "seed_eps") c.seed_eps = to_double(val, key, line);
        else if (key == "ds0") c.ds0 = to_double(val, key, line);
        else if (key == "ds_min") c.ds_min = to_double(val, key, line);
        else if (key == "ds_max") c.ds_max = to_double(val, key, line);
        else if (key == "tau") c.tau = to_double(val, key, line);
        else if (key == "max_points") c.max_points = to_int(val, key, line);
        else if (key == "newton_tol") c.newton_tol = to_double(val, key, line);
        else if (key == "newton_max_iter") c.newton_max_iter = to_int(val, key, line);
        else if (key == "stagnation_floor") c.stagnation_floor = to_double(val, key, line);
        else if (key == "decay_threshold") c.decay_threshold = to_double(val, key, line);
        else if (key == "holder_alpha") c.holder_alpha = to_double(val, key, line);
        else if (key == "sobolev_p") c.sobolev_p = to_double(val, key, line);
        else if (key == "mu") c.mu = to_double(val, key, line);
        else if (key == "spectrum_k") c.spectrum_k = to_int(val, key, line);
        else if (key == "eps_a") c.eps_a = to_double(val, key, line);
        else if (key == "out_dir") c.out_dir = val;
        else if (key == "dry_run") c.dry_run = to_bool(val, key, line);
        else
            throw ConfigError(name + " line " + std::to_string(line) +
                              ": unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    return parse_config(is, path);
}

void save_config(const RunConfig& c, std::ostream& os) {
    os << std::setprecision(17);
    os << "preset = " << c.preset << '\n';
    if (!c.breakpoints.empty()) os << "breakpoints = " << c.breakpoints << '\n';
    os << "depth = " << c.depth << '\n'
       << "gravity = " << c.gravity << '\n'
       << "wave_speed = " << c.wave_speed << '\n'
       << "n_s = " << c.n_s << '\n'
       << "n_r = " << c.n_r << '\n'
       << "L = " << c.L << '\n'
       << "dr = " << c.dr << '\n'
       << "grading = " << c.grading << '\n'
       << "seed_eps = " << c.seed_eps << '\n'
       << "ds0 = " << c.ds0 << '\n'
       << "ds_min = " << c.ds_min << '\n'
       << "ds_max = " << c.ds_max << '\n'
       << "tau = " << c.tau << '\n'
       << "max_points = " << c.max_points << '\n'
       << "newton_tol = " << c.newton_tol << '\n'
       << "newton_max_iter = " << c.newton_max_iter << '\n'
       << "stagnation_floor = " << c.stagnation_floor << '\n'
       << "decay_threshold = " << c.decay_threshold << '\n'
       << "holder_alpha = " << c.holder_alpha << '\n'
       << "sobolev_p = " << c.sobolev_p << '\n'
       << "mu = " << c.mu << '\n'
       << "spectrum_k = " << c.spectrum_k << '\n'
       << "eps_a = " << c.eps_a << '\n'
       << "out_dir = " << c.out_dir << '\n'
       << "dry_run = " << (c.dry_run ? "true" : "false") << '\n';
}

BackgroundCurrent make_current(const RunConfig& c) {
    BackgroundCurrent cur;
    cur.depth = c.depth;
    cur.gravity = c.gravity;
    cur.wave_speed = c.wave_speed;
    const double d = c.depth;
    if (c.preset == "irrotational") {
        cur.shear = {{-d, 1.0}, {0.0, 1.0}};
    } else if (c.preset == "two-layer") {
        cur.shear = {{-d, 1.0}, {-0.5 * d, 1.0}, {0.0, 1.5}};
    } else if (c.preset == "three-layer") {
        cur.shear = {{-d, 1.2}, {-0.6 * d, 1.0}, {-0.3 * d, 1.0}, {0.0, 1.4}};
    } else {
        // custom: "y:u, y:u, ..."
        std::istringstream is(c.breakpoints);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw ConfigError("breakpoints: expected 'y:u' pairs, got '" + tok + "'");
            Breakpoint b;
            b.y = to_double(trim(tok.substr(0, colon)), "breakpoints", 0);
            b.u = to_double(trim(tok.substr(colon + 1)), "breakpoints", 0);
            cur.shear.push_back(b);
        }
    }
    cur.validate();
    return cur;
}

std::string resolve_out_dir(const RunConfig& c) {
    const char* root = std::getenv("SOLWAVE_OUTPUT_ROOT");
    fs::path p(c.out_dir);
    if (root && *root && p.is_relative()) p = fs::path(root) / p;
    return p.string();
}

ContinuationOptions continuation_options(const RunConfig& c) {
    ContinuationOptions o;
    o.ds0 = c.ds0;
    o.ds_min = c.ds_min;
    o.ds_max = c.ds_max;
    o.tau = c.tau;
    o.max_points = c.max_points;
    o.newton.tol = c.newton_tol;
    o.newton.max_iter = c.newton_max_iter;
    o.newton.stagnation_floor = c.stagnation_floor;
    o.holder_alpha = c.holder_alpha;
    o.sobolev_p = c.sobolev_p;
    o.decay_threshold = c.decay_threshold;
    o.L = c.L;
    o.nr = c.n_r;
    o.dr_target = c.dr;
    o.grading = c.grading;
    return o;
}

void emit_plot_data(const Branch& b, const LaminarProfile& p, const std::string& dir) {
    if (b.points.empty()) throw ConfigError("emit_plot_data: empty branch");
    fs::create_directories(dir);

    // Surface profiles for up to 8 points spread along the branch.
    const int n = static_cast<int>(b.points.size());
    const int count = std::min(8, n);
    for (int k = 0; k < count; ++k) {
        const int idx = (n == 1) ? 0 : k * (n - 1) / (count - 1 == 0 ? 1 : count - 1);
        const BranchPoint& pt = b.points[idx];
        auto os = open_out(fs::path(dir) / ("surface_p" + std::to_string(idx) + ".txt"));
        os << std::setprecision(17) << "# x eta (branch point " << idx << ", F=" << pt.F
           << ")\n";
        for (int i = 0; i <= pt.field.grid.nr; ++i)
            os << pt.field.grid.r[i] << ' ' << pt.field.at(i, pt.field.grid.ns) << '\n';
    }

    {
        auto os = open_out(fs::path(dir) / "amplitude_F.txt");
        os << std::setprecision(17) << "# amplitude F\n";
        for (const BranchPoint& pt : b.points)
            os << pt.field.at(0, pt.field.grid.ns) << ' ' << pt.F << '\n';
    }

    // Laminar verification curves on a 50-point kappa grid.
    {
        const double lo = -2.0 * p.Gamma_min + 0.05 * (p.lambda + 2.0 * p.Gamma_min);
        const double hi = p.lambda + 10.0;
        const double Fref = b.points.back().F;
        auto os1 = open_out(fs::path(dir) / "mu_of_kappa.txt");
        auto os2 = open_out(fs::path(dir) / "flow_force_kappa.txt");
        os1 << std::setprecision(17) << "# kappa mu\n";
        os2 << std::setprecision(17) << "# kappa S (F=" << Fref << ")\n";
        for (int k = 0; k < 50; ++k) {
            const double kap = lo + (hi - lo) * k / 49.0;
            os1 << kap << ' ' << mu_of_kappa(p, kap) << '\n';
            os2 << kap << ' ' << laminar_flow_force(p, kap, Fref) << '\n';
        }
    }
}

int run(const RunConfig& c) {
    c.validate();
    const BackgroundCurrent cur = make_current(c);
    auto profile = std::make_shared<const LaminarProfile>(build_profile(cur, c.n_s));
    const std::string dir = resolve_out_dir(c);

    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::create_directories(fs::path(dir) / "points", ec);
    if (!fs::exists(dir)) throw IoError("cannot create output directory: " + dir);

    {
        auto os = open_out(fs::path(dir) / "run_config.txt");
        save_config(c, os);
    }
    {
        auto os = open_out(fs::path(dir) / "profile.txt");
        write_profile_table(*profile, os);
        const CriticalFroude cf = critical_froude(*profile);
        os << "# mu_cr " << std::setprecision(17) << cf.mu_cr << " F_cr " << cf.F_cr
           << '\n';
    }
    {
        const double mu_used = c.mu > 0.0 ? c.mu : profile->mu_cr;
        const SpectrumReport rep = eigenvalues(*profile, mu_used, c.spectrum_k);
        auto os = open_out(fs::path(dir) / "spectrum.txt");
        write_spectrum_table(rep, os);
        if (c.seed_eps < profile->mu_cr) {
            const double F = froude_from_epsilon(*profile, c.seed_eps);
            const AuxiliaryPhiReport aux = c.eps_a >= 0.0
                                               ? auxiliary_phi(*profile, F, c.eps_a)
                                               : auxiliary_phi_auto(*profile, F);
            os << "# auxiliary eps_a " << aux.eps_a << " positivity "
               << (aux.positivity_ok ? "pass" : "fail") << " boundary_sign "
               << (aux.boundary_sign_ok ? "pass" : "fail") << " boundary_value "
               << aux.boundary_value << '\n';
        }
    }
    if (c.dry_run) return 0;

    const Branch branch = run_branch(profile, c.seed_eps, continuation_options(c));
    {
        auto os = open_out(fs::path(dir) / "branch.txt");
        write_branch_table(branch, *profile, os);
    }
    if (branch.points.empty()) return 3;  // seed divergence; partial artifacts kept

    // Persist a spread of solution points with full diagnostics and Eulerian
    // reconstructions.
    const int n = static_cast<int>(branch.points.size());
    std::vector<int> sel = {0, n / 2, n - 1};
    sel.erase(std::unique(sel.begin(), sel.end()), sel.end());
    for (int idx : sel) {
        const BranchPoint& pt = branch.points[idx];
        const std::string tag = std::to_string(idx);
        {
            auto os = open_out(fs::path(dir) / "points" / ("field_" + tag + ".txt"));
            write_field_text(pt.field, pt.F, os);
        }
        {
            std::ofstream os(fs::path(dir) / "points" / ("field_" + tag + ".bin"),
                             std::ios::binary);
            if (!os) throw IoError("cannot write binary field " + tag);
            write_field_binary(pt.field, pt.F, os);
        }
        {
            auto os = open_out(fs::path(dir) / "points" / ("diagnostics_" + tag + ".txt"));
            write_diagnostics(pt.diag, os);
        }
        try {
            EulerianFields e = to_eulerian(pt.field, pt.F);
            pressure_field(e);
            {
                auto os =
                    open_out(fs::path(dir) / "points" / ("eulerian_" + tag + ".txt"));
                write_eulerian(e, os);
            }
            {
                auto os =
                    open_out(fs::path(dir) / "points" / ("surface_" + tag + ".txt"));
                write_surface(e, os);
            }
        } catch (const IoError&) {
            throw;
        } catch (const SolwaveError& e) {
            // A point this close to stagnation may not admit the Eulerian
            // maps at nodal resolution; keep the height-variable artifacts.
            auto os = open_out(fs::path(dir) / "points" / ("eulerian_" + tag + ".txt"));
            os << "# reconstruction unavailable: " << e.what() << '\n';
        }
    }
    emit_plot_data(branch, *profile, (fs::path(dir) / "plots").string());

    return branch.reason == TerminationReason::divergence ? 4 : 0;
}

}  // namespace solwave
