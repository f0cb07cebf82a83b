#include <doctest.h>

#include <cmath>
#include <sstream>

#include "solwave/continuation.hpp"
#include "solwave/small_amplitude.hpp"
#include "test_helpers.hpp"

using namespace solwave;

namespace {

ContinuationOptions quick_opts() {
    ContinuationOptions o;
    o.L = 55.0;
    o.dr_target = 0.15;
    o.grading = 1.3;
    o.newton.tol = 1e-9;
    return o;
}

}  // namespace

TEST_CASE("blowup proxy of the trivial state") {
    auto p = testutil::irrotational(48);
    const Grid g = Grid::uniform(6.0, 10, p->n_cells());
    const HeightField f = HeightField::zero(p, g);
    // sup terms vanish, 1/inf h_s = 1, F = 2, 1/(F - F_cr) = 1
    CHECK(blowup_quantity(f, 2.0) == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("tangent orientation at a small-amplitude point") {
    auto p = testutil::irrotational(64);
    const double eps = 0.03;
    const KdvScaling k = kdv_scaling(*p);
    const Grid g = Grid::uniform(recommended_length(k, eps), 220, p->n_cells());
    const double F = froude_from_epsilon(*p, eps);
    const HeightField sol = newton_solve(initial_guess(p, eps, g), F, {});

    BranchTangent prev;
    prev.dphi = Eigen::VectorXd::Zero(sol.n_nodes());
    prev.dF = 1.0;
    const BranchTangent t1 = tangent(sol, F, {}, prev);
    CHECK(t1.dF > 0.0);  // F increases along the branch initially

    // unit normalization in the weighted product
    const double n2 = t1.dphi.squaredNorm() / t1.dphi.size() + t1.dF * t1.dF;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));

    // consecutive tangents keep positive inner product
    const StepResult next = step(sol, F, t1, 0.02, {}, 12);
    const BranchTangent t2 = tangent(next.field, next.F, {}, t1);
    const double ip = t1.dphi.dot(t2.dphi) / t1.dphi.size() + t1.dF * t2.dF;
    CHECK(ip > 0.0);
}

TEST_CASE("zero step returns the same point") {
    auto p = testutil::irrotational(64);
    const double eps = 0.03;
    const KdvScaling k = kdv_scaling(*p);
    const Grid g = Grid::uniform(recommended_length(k, eps), 200, p->n_cells());
    const double F = froude_from_epsilon(*p, eps);
    const HeightField sol = newton_solve(initial_guess(p, eps, g), F, {});
    BranchTangent prev;
    prev.dphi = Eigen::VectorXd::Zero(sol.n_nodes());
    prev.dF = 1.0;
    const BranchTangent t = tangent(sol, F, {}, prev);
    const StepResult same = step(sol, F, t, 0.0, {}, 12);
    CHECK(same.F == F);
    for (int i = 0; i < sol.n_nodes(); ++i) CHECK(same.field.phi[i] == sol.phi[i]);
}

TEST_CASE("budget termination and strictly increasing arclength") {
    auto p = testutil::irrotational(64);
    ContinuationOptions o = quick_opts();
    o.max_points = 5;
    const Branch b = run_branch(p, 0.05, o);
    CHECK(b.reason == TerminationReason::budget);
    CHECK(static_cast<int>(b.points.size()) == 5);
    const double F_cr = critical_froude(*p).F_cr;
    for (size_t i = 0; i < b.points.size(); ++i) {
        CHECK(b.points[i].F > F_cr);
        if (i > 0) CHECK(b.points[i].t > b.points[i - 1].t);
    }
    // F grows along the early branch
    CHECK(b.points.back().F > b.points.front().F);
}

TEST_CASE("branch tables are deterministic") {
    auto p = testutil::two_layer(48);
    ContinuationOptions o = quick_opts();
    o.max_points = 4;
    const Branch b1 = run_branch(p, 0.05, o);
    const Branch b2 = run_branch(p, 0.05, o);
    std::ostringstream s1, s2;
    write_branch_table(b1, *p, s1);
    write_branch_table(b2, *p, s2);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("termination: budget") != std::string::npos);
}

TEST_CASE("hopeless seed reports divergence with no points") {
    auto p = testutil::irrotational(48);
    ContinuationOptions o = quick_opts();
    o.L = 10.0;  // far too short for the seed decay length -> DomainError
    const Branch b = run_branch(p, 0.01, o);
    CHECK(b.reason == TerminationReason::divergence);
    CHECK(b.points.empty());
}

TEST_CASE("stagnation threshold reached on the uniform preset") {
    auto p = testutil::irrotational(64);
    ContinuationOptions o = quick_opts();
    o.tau = 0.6;  // early stop keeps the test fast
    o.max_points = 60;
    const Branch b = run_branch(p, 0.05, o);
    CHECK(b.reason == TerminationReason::stagnation_threshold);
    CHECK(b.points.back().diag.min_cu <= 0.6);
    CHECK(b.points.back().diag.max_hs >= 1.0 / 0.6);
    // the norm part of the blowup proxy grows toward stagnation even while
    // the 1/(F - F_cr) part of the seed value shrinks
    CHECK(b.points.back().diag.max_hs > b.points.front().diag.max_hs);
}
