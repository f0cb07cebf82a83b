#pragma once

#include <iosfwd>
#include <vector>

#include "solwave/height_solver.hpp"

namespace solwave {

enum class Flag { pass, fail, not_applicable };
const char* flag_name(Flag f);

struct DiagnosticsReport {
    std::vector<double> flow_force_columns;  // one value per cell column
    double flow_force_spread = 0.0;          // (max-min)/|mean|

    Flag elevation = Flag::not_applicable;   // phi > 0 in the interior/surface
    Flag monotone = Flag::not_applicable;    // phi_r < 0 for r > 0

    double supercritical_margin = 0.0;       // F - F_cr

    double froude_bound_slack = 0.0;         // crest-column reading (authoritative)
    double froude_bound_slack_surface = 0.0; // surface-trace reading (reported)
    Flag froude_bound = Flag::not_applicable;

    double min_hs = 0.0, max_hs = 0.0, min_cu = 0.0;

    // Filled by field_reconstruction::bound_checks when available.
    double pressure_bound_min = 0.0;
    double velocity_bound_slack = 0.0;
    Flag pressure_velocity_bounds = Flag::not_applicable;
};

// Flow force of one cell column (0 <= col < nr), quadrature consistent with
// the cell representation: exact on laminar fields.
double flow_force(const HeightField& f, double F, int col);

// All columns in one sweep.
std::vector<double> flow_force_columns(const HeightField& f, double F);

// Closed-form laminar flow force (matches flow_force on laminar fields).
double laminar_flow_force(const LaminarProfile& p, double kappa, double F);

struct QualitativeFlags {
    Flag elevation;
    Flag monotone;
};
QualitativeFlags qualitative_check(const HeightField& f, double F);

struct FroudeBoundReport {
    double slack_crest;    // RHS(crest column) - F^2
    double slack_surface;  // RHS(surface trace) - F^2
    Flag flag;             // pass/fail on the crest reading; n/a for phi == 0
};
FroudeBoundReport froude_bound_check(const HeightField& f, double F);

struct StagnationMeasures {
    double min_hs;
    double max_hs;
    double min_cu;  // = 1/max_hs
};
StagnationMeasures stagnation_measures(const HeightField& f);

// Everything above in one report (pressure/velocity bounds left n/a).
DiagnosticsReport diagnose(const HeightField& f, double F);

void write_diagnostics(const DiagnosticsReport& d, std::ostream& os);

}  // namespace solwave
