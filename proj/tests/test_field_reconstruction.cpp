#include <doctest.h>

#include <cmath>
#include <sstream>

#include "solwave/field_reconstruction.hpp"
#include "solwave/small_amplitude.hpp"
#include "test_helpers.hpp"

using namespace solwave;

namespace {

HeightField solve_seeded(std::shared_ptr<const LaminarProfile> p, double eps,
                         double& F) {
    const KdvScaling k = kdv_scaling(*p);
    const double L = recommended_length(k, eps);
    const Grid g = Grid::uniform(L, std::max(150, static_cast<int>(L / 0.3)),
                                 p->n_cells());
    F = froude_from_epsilon(*p, eps);
    return newton_solve(initial_guess(p, eps, g), F, {});
}

}  // namespace

TEST_CASE("trivial field maps to the laminar Eulerian state") {
    auto p = testutil::irrotational(48);
    const Grid g = Grid::uniform(6.0, 10, p->n_cells());
    const HeightField f = HeightField::zero(p, g);
    const double F = 1.5;
    EulerianFields e = to_eulerian(f, F);
    pressure_field(e);
    const double mu = 1.0 / (F * F);
    for (int i = 0; i <= g.nr; ++i) {
        CHECK(e.eta[i] == doctest::Approx(0.0).epsilon(1e-13));
        for (int j = 0; j <= g.ns; ++j) {
            // u - c = -1/H_s = -1; absolute u = c_nd - 1 = 0
            CHECK(e.at(e.u, i, j) == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(e.at(e.v, i, j) == doctest::Approx(0.0).epsilon(1e-13));
            CHECK(e.at(e.psi, i, j) == doctest::Approx(-p->s[j]).epsilon(1e-13));
            // hydrostatic pressure mu * (-y)
            CHECK(e.at(e.P, i, j) ==
                  doctest::Approx(-mu * e.at(e.y, i, j)).epsilon(1e-12));
        }
    }
    const BoundCheckReport b = bound_checks(e, *p, F);
    CHECK(b.flag == Flag::pass);
    CHECK(b.pressure_bound_min >= -1e-12);
    CHECK(psi_column_error(e) < 1e-12);
}

TEST_CASE("surface pressure vanishes identically on a converged wave") {
    auto p = testutil::two_layer(64);
    double F = 0.0;
    const HeightField sol = solve_seeded(p, 0.03, F);
    EulerianFields e = to_eulerian(sol, F);
    pressure_field(e);
    for (int i = 0; i <= sol.grid.nr; ++i)
        CHECK(std::abs(e.at(e.P, i, sol.grid.ns)) < 1e-12);
    // surface elevation positive and decaying
    CHECK(e.eta[0] > 0.0);
    CHECK(e.eta[sol.grid.nr] == doctest::Approx(0.0).epsilon(1e-10));
    const BoundCheckReport b = bound_checks(e, *p, F);
    CHECK(b.flag == Flag::pass);
}

TEST_CASE("round-trip reconstruction stays within its tolerance") {
    for (auto p : {testutil::irrotational(64), testutil::two_layer(64)}) {
        double F = 0.0;
        const HeightField sol = solve_seeded(p, 0.03, F);
        const EulerianFields e = to_eulerian(sol, F);
        const RoundtripReport rt = roundtrip(e);
        CHECK(rt.tol_interp > 0.0);
        CHECK(rt.error_sup < 10.0 * rt.tol_interp);
        // the reconstructed field shares the source grid
        CHECK(rt.field.grid.nr == sol.grid.nr);
    }
}

TEST_CASE("velocity bound has positive slack on small waves") {
    auto p = testutil::irrotational(64);
    double F = 0.0;
    const HeightField sol = solve_seeded(p, 0.02, F);
    EulerianFields e = to_eulerian(sol, F);
    pressure_field(e);
    const BoundCheckReport b = bound_checks(e, *p, F);
    CHECK(b.velocity_bound_slack > 0.0);
    CHECK(b.pressure_bound_min >= -1e-8);
}

TEST_CASE("shear-layer kink is confined to the jump face image") {
    auto p = testutil::two_layer(64);
    double F = 0.0;
    const HeightField sol = solve_seeded(p, 0.04, F);
    const EulerianFields e = to_eulerian(sol, F);
    const int jf = p->jump_faces[0];
    // relative horizontal velocity at the crest column as a function of y;
    // its slope in j jumps only across the interface face
    const int i = 0, ns = sol.grid.ns;
    std::vector<double> slope(ns);
    for (int j = 0; j < ns; ++j) {
        const double du = e.at(e.u, i, j + 1) - e.at(e.u, i, j);
        const double dy = e.at(e.y, i, j + 1) - e.at(e.y, i, j);
        slope[j] = du / dy;
    }
    double jump_at_face = std::abs(slope[jf] - slope[jf - 1]);
    double elsewhere = 0.0;
    for (int j = 1; j < ns; ++j) {
        if (std::abs(j - jf) <= 1) continue;
        elsewhere = std::max(elsewhere, std::abs(slope[j] - slope[j - 1]));
    }
    CHECK(jump_at_face > 10.0 * elsewhere);
}

TEST_CASE("exports carry the unit record and reload consistently") {
    auto p = testutil::irrotational(48);
    const Grid g = Grid::uniform(6.0, 10, p->n_cells());
    EulerianFields e = to_eulerian(HeightField::zero(p, g), 1.4);
    pressure_field(e);
    std::ostringstream os1, os2;
    write_eulerian(e, os1);
    write_surface(e, os2);
    CHECK(os1.str().find("scales:") != std::string::npos);
    CHECK(os2.str().find("x eta") != std::string::npos);
    // one surface row per r-node
    int rows = 0;
    std::istringstream is(os2.str());
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == g.nr + 1);
}
