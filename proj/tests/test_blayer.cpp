#include <cmath>
#include <complex>

#include "doctest.h"
#include "reglab/blayer.hpp"
#include "reglab/errors.hpp"

using namespace reglab;
using doctest::Approx;

namespace {

double sup_distance(const BoundaryLayerProfile& a, const BoundaryLayerProfile& b) {
    return (a.g - b.g).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("biharmonic closed form: wall conditions and curvature") {
    const auto p = biharmonic_profile();
    CHECK(p(0.0) == 0.0);
    CHECK(std::abs(closed_form_value(LayerFamily::biharmonic(), 0.0, 1)) < 1e-15);
    CHECK(p.gamma1 == Approx(std::pow(2.0, -4.0 / 3.0)).epsilon(1e-14));
    CHECK(p.gamma1 == Approx(0.39685).epsilon(1e-5));
    // central differences at h = 1e-4 on the even extension g(-h) = g(h) about the wall
    const double h = 1e-4;
    const auto f = LayerFamily::biharmonic();
    const double fd2 = (closed_form_value(f, h) - 2 * closed_form_value(f, 0.0) + closed_form_value(f, -h)) / (h * h);
    CHECK(fd2 == Approx(p.gamma1).epsilon(1e-6));
    // integrated layer equation g''' = (g - 1)/4 at the wall
    CHECK(p.gamma2 == Approx(-0.25).epsilon(1e-14));
    CHECK(p.far_field == 1.0);
}

TEST_CASE("biharmonic explicit formula equals the modal construction") {
    const auto explicit_form = biharmonic_profile();
    const auto modal = closed_form_profile(LayerFamily::biharmonic());
    CHECK(sup_distance(explicit_form, modal) < 1e-14);
}

TEST_CASE("characteristic roots of the biharmonic layer operator") {
    const auto roots = characteristic_roots(LayerFamily::biharmonic());
    REQUIRE(roots.size() == 4);
    const double r = std::pow(4.0, -1.0 / 3.0);
    CHECK(std::abs(roots[0] - std::complex<double>(r, 0)) < 1e-14);
    CHECK(std::abs(roots[1]) < 1e-15);
    CHECK(std::abs(roots[2] - r * std::complex<double>(-0.5, std::sqrt(3.0) / 2)) < 1e-14);
    CHECK(std::abs(roots[3] - r * std::complex<double>(-0.5, -std::sqrt(3.0) / 2)) < 1e-14);
    for (const auto& z : roots) CHECK(std::abs(-std::pow(z, 4) + z / 4.0) < 1e-15);
}

TEST_CASE("biharmonic closed form solves the layer equation") {
    const auto f = LayerFamily::biharmonic();
    double worst = 0.0;
    for (int i = 0; i <= 300; ++i) {
        const double s = 0.1 * i;
        worst = std::max(worst, std::abs(-closed_form_value(f, s, 4) + closed_form_value(f, s, 1) / 4));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("biharmonic envelope bound") {
    const auto f = LayerFamily::biharmonic();
    const double beta = std::pow(2.0, -5.0 / 3.0);
    for (int i = 0; i <= 600; ++i) {
        const double s = 0.05 * i;
        CHECK(std::abs(closed_form_value(f, s) - 1.0) <= std::exp(-beta * s) * (1 + 1 / std::sqrt(3.0)) + 1e-15);
    }
}

TEST_CASE("dispersion closed form") {
    const auto p = dispersion_profile();
    CHECK(p(0.0) == 0.0);
    CHECK(std::abs(p(200.0) - 1.0) < 1e-15);
    CHECK(p.gamma1 == Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(p.gamma2 == Approx(-1.0 / 3.0).epsilon(1e-14));
    CHECK(p(std::sqrt(3.0) * std::log(2.0)) == Approx(0.5).epsilon(1e-14));
    // g''' - g'/3 = 0
    const auto f = LayerFamily::dispersion3();
    for (double s : {0.0, 1.0, 5.0}) CHECK(std::abs(closed_form_value(f, s, 3) - closed_form_value(f, s, 1) / 3) < 1e-15);
}

TEST_CASE("heat closed form wall constants") {
    const auto p = heat_profile();
    CHECK(p.gamma1 == Approx(0.5).epsilon(1e-15));
    CHECK(p.gamma2 == Approx(-0.25).epsilon(1e-15));
    const auto w = wall_constants(p);
    CHECK(w.gamma1 == p.gamma1);
}

TEST_CASE("shooting reproduces the closed-form layers") {
    for (auto f : {LayerFamily::heat(), LayerFamily::biharmonic(), LayerFamily::parabolic(3), LayerFamily::dispersion3()}) {
        CAPTURE(f.name());
        const auto bvp = solve_bl_bvp(f, 30.0);
        const auto exact = closed_form_profile(f, 30.0);
        CHECK(bvp.source == ProfileSource::bvp);
        CHECK(sup_distance(bvp, exact) <= 1e-6);
        CHECK(bvp.gamma1 == Approx(exact.gamma1).epsilon(1e-10));
        CHECK(bvp.gamma2 == Approx(exact.gamma2).epsilon(1e-10));
        // interpolated values between grid points
        CHECK(std::abs(bvp(7.31) - closed_form_value(f, 7.31)) < 1e-6);
    }
}

TEST_CASE("Richardson wall constants of the shooting profiles") {
    const auto b = solve_bl_bvp(LayerFamily::biharmonic());
    const auto w = wall_constants(b);
    CHECK(w.gamma1 == Approx(std::pow(2.0, -4.0 / 3.0)).epsilon(1e-8));
    CHECK(w.gamma2 == Approx(-0.25).epsilon(1e-6));
    const auto d = wall_constants(solve_bl_bvp(LayerFamily::dispersion3()));
    CHECK(d.gamma1 == Approx(1 / std::sqrt(3.0)).epsilon(1e-8));
    CHECK(d.gamma2 == Approx(-1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("one-sided difference weights are exact on polynomials") {
    Eigen::VectorXd s(15);
    const double h = 0.1;
    for (int j = 0; j < 15; ++j) {
        const double x = j * h;
        s(j) = 2 - 3 * x + 0.5 * x * x + x * x * x;
    }
    CHECK(richardson_wall_derivative(s, h, 1) == Approx(-3.0).epsilon(1e-10));
    CHECK(richardson_wall_derivative(s, h, 2) == Approx(1.0).epsilon(1e-10));
    CHECK(richardson_wall_derivative(s, h, 3) == Approx(6.0).epsilon(1e-9));
    CHECK_THROWS_AS(richardson_wall_derivative(s.head(5), h, 2), DomainError);
}

TEST_CASE("doubling the truncation leaves the wall constants unchanged") {
    for (auto f : {LayerFamily::biharmonic(), LayerFamily::pme4()}) {
        CAPTURE(f.name());
        const auto a = solve_bl_bvp(f, 30.0, 1e-12, 601);
        const auto b = solve_bl_bvp(f, 60.0, 1e-12, 1201);
        CHECK(std::abs(a.gamma1 - b.gamma1) < 1e-8);
        CHECK(std::abs(a.gamma2 - b.gamma2) < 1e-8);
    }
}

TEST_CASE("porous-medium layer profile") {
    const auto p = solve_bl_bvp(LayerFamily::pme4(), 60.0, 1e-12, 1201);
    CHECK(p.g(0) == 0.0);
    CHECK(p.wall(1) == 0.0);
    CHECK(p.gamma1 > 0);
    CHECK(p.gamma2 == -0.25);
    CHECK(std::abs(p.far_field - 1.0) <= 1e-4);
    // one visible overshoot above 1, as in the linear profile
    CHECK(p.overshoots() == 1);
    CHECK(biharmonic_profile().overshoots() == 1);
    // finitely many crossings of the far-field value on the window
    CHECK(p.far_field_crossings(1e-8) < 12);
    // the wall-sample estimate agrees with the shooting curvature
    CHECK(wall_constants(p).gamma1 == Approx(p.gamma1).epsilon(1e-4));
    // envelope: the excursions shrink
    double first = 0.0, late = 0.0;
    for (Eigen::Index i = 0; i < p.xi.size(); ++i) {
        if (p.xi(i) > 5 && p.xi(i) < 15) first = std::max(first, std::abs(p.g(i) - 1));
        if (p.xi(i) > 40) late = std::max(late, std::abs(p.g(i) - 1));
    }
    CHECK(late < 0.01 * first);
    // similar to the linear profile: both rise through 1/2 at comparable depths
    const auto lin = biharmonic_profile();
    double x_pme = 0.0, x_lin = 0.0;
    for (Eigen::Index i = 0; i < 601; ++i) {
        if (x_pme == 0.0 && p.g(i) > 0.5) x_pme = p.xi(i);
        if (x_lin == 0.0 && lin.g(i) > 0.5) x_lin = lin.xi(i);
    }
    CHECK(x_pme / x_lin > 0.5);
    CHECK(x_pme / x_lin < 2.0);
}

TEST_CASE("layer families") {
    CHECK(LayerFamily::from(EquationFamily::biharmonic()) == LayerFamily::biharmonic());
    CHECK(LayerFamily::from(EquationFamily::dispersion3()) == LayerFamily::dispersion3());
    CHECK_THROWS_AS(LayerFamily::from(EquationFamily::beam4()), DomainError);
    CHECK_THROWS_AS(closed_form_value(LayerFamily::pme4(), 1.0), DomainError);
    CHECK_THROWS_AS(solve_bl_bvp(LayerFamily::biharmonic(), -1.0), DomainError);
}
