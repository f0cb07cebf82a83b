#pragma once

#include <iosfwd>
#include <string>

#include "solwave/background_flow.hpp"
#include "solwave/continuation.hpp"

namespace solwave {

// Flat key=value run configuration. Every CLI flag mirrors one key.
struct RunConfig {
    // Background current: preset name or explicit breakpoints ("y:u, y:u, ...").
    std::string preset = "irrotational";  // irrotational | two-layer | three-layer | custom
    std::string breakpoints;              // required iff preset == custom
    double depth = 1.0;
    double gravity = 1.0;
    double wave_speed = 1.0;

    // Grid.
    int n_s = 64;
    int n_r = 0;        // 0 = auto from L and dr
    double L = 0.0;     // 0 = auto from the seed decay length
    double dr = 0.35;   // target r spacing when n_r = 0
    double grading = 1.0;  // r_i = L*(i/n_r)^grading (1 = uniform)

    // Seeding and continuation.
    double seed_eps = 0.05;
    double ds0 = 0.02;
    double ds_min = 1e-4;
    double ds_max = 0.15;
    double tau = 0.2;
    int max_points = 200;

    // Tolerances.
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
    double stagnation_floor = 1e-6;
    double decay_threshold = 1e-5;

    // Norm proxies.
    double holder_alpha = 0.5;
    double sobolev_p = 2.0;

    // Spectrum.
    double mu = 0.0;     // 0 = use mu_cr
    int spectrum_k = 3;
    double eps_a = -1.0;  // < 0 = automatic ladder choice

    // Output.
    std::string out_dir = "out";
    bool dry_run = false;

    void validate() const;  // throws ConfigError naming the offending field
};

// Parse/serialize the flat key=value format; unknown keys are rejected with a
// line number. save/load round-trips to the identical config.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& is, const std::string& name);
void save_config(const RunConfig& c, std::ostream& os);

// Resolve the preset or breakpoint list into a BackgroundCurrent.
BackgroundCurrent make_current(const RunConfig& c);

// Output directory after applying the SOLWAVE_OUTPUT_ROOT override.
std::string resolve_out_dir(const RunConfig& c);

ContinuationOptions continuation_options(const RunConfig& c);

// Plot-data series: (x, eta) per selected point, (amplitude, F) curve, and
// the (kappa, mu) / (kappa, S) verification curves. Throws ConfigError on an
// empty branch.
void emit_plot_data(const Branch& b, const LaminarProfile& p, const std::string& dir);

// Full orchestration: profile -> spectrum -> seed -> branch -> exports.
// Returns a process exit code (0 ok, 3 seed divergence, 4 continuation
// divergence); writes artifacts under resolve_out_dir(c).
int run(const RunConfig& c);

}  // namespace solwave
