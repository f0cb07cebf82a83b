#include <doctest.h>

#include <cmath>

#include "solwave/height_solver.hpp"
#include "solwave/small_amplitude.hpp"
#include "test_helpers.hpp"

using namespace solwave;

TEST_CASE("uniform-flow scaling constants are classical") {
    auto p = testutil::irrotational(64);
    const KdvScaling k = kdv_scaling(*p);
    CHECK(k.phi_cr0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.I5 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.Iw == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(k.cA == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.cW == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("sheared scaling constants match independent quadrature") {
    auto p = testutil::two_layer(64);
    const KdvScaling k = kdv_scaling(*p);
    // I5 via fine trapezoid on the nodes of a high-resolution profile
    auto fine = testutil::two_layer(1024);
    double i5 = 0.0, u10 = 0.0;
    for (int j = 0; j < fine->n_cells(); ++j) {
        const double a = std::pow(fine->Hs[j], 5), b = std::pow(fine->Hs[j + 1], 5);
        i5 += 0.5 * (a + b) * fine->ds(j);
        u10 += 0.5 * (std::pow(fine->Hs[j], 3) + std::pow(fine->Hs[j + 1], 3)) *
               fine->ds(j);
    }
    CHECK(k.I5 == doctest::Approx(i5).epsilon(1e-6));
    CHECK(k.cA == doctest::Approx(u10 * u10 / i5).epsilon(1e-6));
    CHECK(k.cA > 0.0);
    CHECK(k.cW > 0.0);
}

TEST_CASE("supercritical parameterization") {
    for (auto p : {testutil::irrotational(64), testutil::two_layer(64)}) {
        for (double eps : {0.01, 0.05, 0.2}) {
            const double F = froude_from_epsilon(*p, eps);
            CHECK(1.0 / (F * F) == doctest::Approx(p->mu_cr - eps).epsilon(1e-13));
            CHECK(F > critical_froude(*p).F_cr);
        }
    }
}

TEST_CASE("reduced orbit is the squared hyperbolic secant") {
    const std::vector<double> R = {-3.0, -1.0, 0.0, 0.5, 2.0};
    const std::vector<double> z = reduced_orbit(0.02, R);
    for (size_t i = 0; i < R.size(); ++i) {
        const double c = std::cosh(0.5 * R[i]);
        CHECK(z[i] == doctest::Approx(1.0 / (c * c)).epsilon(1e-13));
    }
}

TEST_CASE("seed guess has the separable sech^2 shape") {
    auto p = testutil::irrotational(64);
    const double eps = 0.02;
    const KdvScaling k = kdv_scaling(*p);
    const double L = recommended_length(k, eps);
    const Grid g = Grid::uniform(L, 100, p->n_cells());
    const HeightField f = initial_guess(p, eps, g);
    // crest column equals eps * cA * u1(s); irrotational u1 = s + 1
    for (int j = 0; j <= g.ns; ++j)
        CHECK(f.at(0, j) == doctest::Approx(eps * (p->s[j] + 1.0)).epsilon(1e-10));
    // horizontal shape at the surface: sech^2(cW sqrt(eps) r / 2)
    for (int i : {5, 20, 50}) {
        const double c = std::cosh(0.5 * k.cW * std::sqrt(eps) * g.r[i]);
        CHECK(f.at(i, g.ns) == doctest::Approx(eps / (c * c)).epsilon(1e-10));
    }
    // far-field Dirichlet column exactly zero
    for (int j = 0; j <= g.ns; ++j) CHECK(f.at(g.nr, j) == 0.0);
}

TEST_CASE("seed guards") {
    auto p = testutil::irrotational(64);
    const Grid g = Grid::uniform(60.0, 100, p->n_cells());
    CHECK_THROWS_AS(initial_guess(p, -0.01, g), ConfigError);
    CHECK_THROWS_AS(initial_guess(p, 0.2, g, 0.05), ConfigError);
    const Grid shrt = Grid::uniform(5.0, 20, p->n_cells());
    CHECK_THROWS_AS(initial_guess(p, 0.02, shrt), DomainError);
}

TEST_CASE("guess residual shrinks superlinearly in eps") {
    for (auto p : {testutil::irrotational(64), testutil::two_layer(64)}) {
        const KdvScaling k = kdv_scaling(*p);
        std::vector<double> rn;
        for (double eps : {0.02, 0.01, 0.005}) {
            const double L = recommended_length(k, eps);
            const Grid g = Grid::uniform(L, 400, p->n_cells());
            const HeightField f = initial_guess(p, eps, g);
            const double F = froude_from_epsilon(*p, eps);
            rn.push_back(residual(f, F).lpNorm<Eigen::Infinity>());
        }
        const double order1 = std::log2(rn[0] / rn[1]);
        const double order2 = std::log2(rn[1] / rn[2]);
        CHECK(order1 >= 1.5);
        CHECK(order2 >= 1.5);
    }
}
