#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <memory>
#include <vector>

#include "solwave/diagnostics.hpp"
#include "solwave/height_solver.hpp"

namespace solwave {

struct BranchPoint {
    HeightField field;
    double F = 0.0;
    double t = 0.0;  // arclength parameter, strictly increasing
    DiagnosticsReport diag;
    double N = 0.0;  // blowup quantity
};

enum class TerminationReason { stagnation_threshold, step_floor, budget, divergence };
const char* termination_name(TerminationReason r);

struct Branch {
    std::vector<BranchPoint> points;
    TerminationReason reason = TerminationReason::budget;
};

struct ContinuationOptions {
    double ds0 = 0.02;
    double ds_min = 1e-4;
    double ds_max = 0.15;
    double ds_grow = 1.3;
    double tau = 0.2;        // stop when min(c-u) = 1/max(h_s) <= tau
    int max_points = 200;
    SolverOptions newton;
    int corrector_max_iter = 12;
    double holder_alpha = 0.5;  // in (0, 1/2]
    double sobolev_p = 2.0;
    double decay_threshold = 1e-5;  // tail ratio triggering domain extension
    double extend_factor = 1.4;
    bool with_bound_checks = true;  // per-point pressure/velocity bounds
    // Grid policy: 0 = auto (seed decay length / dr_target).
    double L = 0.0;
    int nr = 0;
    double dr_target = 0.35;
    double grading = 1.0;
};

// Discrete proxy of the blowup quantity:
// C^{1,alpha} proxy + W^{2,p} proxy on |r|<=2 + 1/inf(phi_s+H_s) + F + 1/(F-F_cr).
double blowup_quantity(const HeightField& f, double F, double alpha = 0.5,
                       double p = 2.0);

struct BranchTangent {
    Eigen::VectorXd dphi;
    double dF = 0.0;
};

// Null-ish direction of the bordered system, unit length, oriented along prev.
BranchTangent tangent(const HeightField& f, double F, const SolverOptions& opts,
                      const BranchTangent& prev);

// One pseudo-arclength predictor/corrector step; throws ContinuationError on
// corrector divergence.
struct StepResult {
    HeightField field;
    double F;
};
StepResult step(const HeightField& f, double F, const BranchTangent& tan, double ds,
                const SolverOptions& opts, int corrector_max_iter);

// Seed from the KdV guess at eps and continue toward stagnation.
Branch run_branch(std::shared_ptr<const LaminarProfile> profile, double seed_eps,
                  const ContinuationOptions& opts);

// Delimited summary: t F eps_equiv crest max_hs min_hs spread N flags.
void write_branch_table(const Branch& b, const LaminarProfile& p, std::ostream& os);

}  // namespace solwave
