#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nilcmc/gw.hpp"
#include "nilcmc/sinh_gordon.hpp"

using namespace nilcmc;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexField constant(const GridSpec& g, cd value) {
    ComplexField f(g);
    for (cd& z : f.val) z = value;
    return f;
}

SpinorField constant_spinor(const GridSpec& g, cd p1, cd p2) {
    SpinorField s(g);
    for (cd& z : s.psi1.val) z = p1;
    for (cd& z : s.psi2.val) z = p2;
    return s;
}

double absmax(const ComplexField& f) {
    double m = 0.0;
    for (const cd& z : f.val) m = std::max(m, std::abs(z));
    return m;
}

bool mat_close(const Mat2& m, cd a, cd b, cd c, cd d, double tol = 1e-14) {
    return std::abs(m.a - a) <= tol && std::abs(m.b - b) <= tol && std::abs(m.c - c) <= tol &&
           std::abs(m.d - d) <= tol;
}

} // namespace

TEST_CASE("frame coefficients and conformality for the unit diagonal spinor") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    SpinorField s = constant_spinor(g, cd{1, 0}, cd{1, 0});
    FrameCoeffs fc = frame_coefficients(s);
    CHECK(std::abs(fc.alpha.at(2, 3) - cd{0, 1}) <= 1e-15);
    CHECK(std::abs(fc.beta.at(2, 3)) <= 1e-15);
    CHECK(std::abs(fc.gamma.at(2, 3) - cd{1, 0}) <= 1e-15);
    CHECK(absmax(conformality_residual_field(s)) <= 1e-15);
    RealField cf = conformal_factor_field(s);
    for (double v : cf.val) CHECK(v == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("conformality is an algebraic identity under fuzzing") {
    GridSpec g{100, 100, 0.01, 0.01, 0.0, 0.0};
    std::mt19937 gen(99);
    auto u = [&] { return gen() * (1.0 / 4294967296.0) * 4.0 - 2.0; };
    SpinorField s(g);
    for (cd& z : s.psi1.val) z = cd{u(), u()};
    for (cd& z : s.psi2.val) z = cd{u(), u()};
    ComplexField res = conformality_residual_field(s);
    RealField cf = conformal_factor_field(s);
    for (size_t k = 0; k < res.val.size(); ++k)
        CHECK(std::abs(res.val[k]) <= 1e-13 * std::max(1.0, cf.val[k]));
}

TEST_CASE("dirac potential closed forms") {
    GridSpec g{4, 4, 0.1, 0.1, 0.0, 0.0};
    CHECK(std::abs(dirac_potential(constant_spinor(g, {1, 0}, {1, 0}), 1.0).at(1, 1) - cd{1, 0}) <=
          1e-15);
    CHECK(std::abs(dirac_potential(constant_spinor(g, {1, 0}, {0, 0}), 0.0).at(1, 1) -
                   cd{0, -0.25}) <= 1e-15);
    CHECK(std::abs(dirac_potential(constant_spinor(g, {0, 0}, {2, 0}), 0.5).at(1, 1) - cd{1, 1}) <=
          1e-15);
}

TEST_CASE("frame equation matrices at reference potentials") {
    GridSpec g{4, 4, 0.1, 0.1, 0.0, 0.0};

    GWMatrices m0 = gw_matrices(constant(g, {0, 0}), constant(g, {1, 0}));
    CHECK(mat_close(m0.M1[5], 0, 1, -1, 0));
    CHECK(mat_close(m0.M2[5], 0, 1, -1, 0));

    GWMatrices mln2 = gw_matrices(constant(g, {std::log(2.0), 0}), constant(g, {0, 0}));
    CHECK(mat_close(mln2.M1[5], 0, 0, -2, 0));
    CHECK(mat_close(mln2.M2[5], 0, 2, 0, 0));

    GWMatrices mi = gw_matrices(constant(g, {0, kPi / 2}), constant(g, {-1, 0}));
    CHECK(mat_close(mi.M1[5], 0, cd{0, 1}, cd{0, -1}, 0));
    CHECK(mat_close(mi.M2[5], 0, cd{0, 1}, cd{0, -1}, 0));
}

TEST_CASE("transport matches the rotation closed form and solves its Dirac equation") {
    GridSpec g{65, 33, 0.01, 0.01, -0.32, -0.16};
    ComplexField v = constant(g, {0, 0});
    ComplexField b = constant(g, {1, 0});
    TransportResult tr = integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 32, 16);
    // A_x = 2[[0,1],[-1,0]], A_y = 0: psi = (cos 2x, -sin 2x), independent of y
    double dev = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double x = g.x(i);
            dev = std::max(dev, std::abs(tr.psi.psi1.at(i, j) - std::cos(2.0 * x)));
            dev = std::max(dev, std::abs(tr.psi.psi2.at(i, j) + std::sin(2.0 * x)));
        }
    CHECK(dev <= 1e-9); // fourth-order transport at h = 0.01

    // the transported field satisfies the Dirac system with potential e^v = 1
    ComplexField u = constant(g, {1, 0});
    auto [r1, r2] = dirac_residual_fields(tr.psi, u);
    CHECK(absmax(r1) <= 2e-4); // second-order stencil error on cos(2x)
    CHECK(absmax(r2) <= 2e-4);

    // compatibility holds exactly here, so no warning is emitted
    CHECK(tr.warnings.empty());
}

TEST_CASE("transport warns when the potential is not a solution") {
    GridSpec g{16, 16, 0.01, 0.01, 0.0, 0.0};
    ComplexField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) v.at(i, j) = cd{0.3 * g.x(i) * g.x(i), 0.7};
    ComplexField b = constant(g, ar_coefficient_constant(0.5));
    TransportResult tr = integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 8, 8);
    REQUIRE(!tr.warnings.empty());
    CHECK(tr.warnings[0].find("path-dependent") != std::string::npos);
}

TEST_CASE("transport warns on a non-holomorphic coefficient field") {
    GridSpec g{16, 16, 0.01, 0.01, 0.0, 0.0};
    ComplexField v = constant(g, {0, kPi / 2});
    ComplexField b(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) b.at(i, j) = cd{g.x(i), -g.y(j)}; // zbar
    TransportResult tr = integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 8, 8);
    bool found = false;
    for (const std::string& w : tr.warnings)
        if (w.find("holomorph") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("transport trips the norm guard on runaway data") {
    GridSpec g{64, 8, 0.01, 0.01, 0.0, 0.0};
    ComplexField v = constant(g, {10.0, 0.0});
    ComplexField b = constant(g, {0, 0});
    CHECK_THROWS_AS((void)integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 0, 0), NormGuardError);
}

TEST_CASE("transport needs at least four nodes per direction") {
    GridSpec g{3, 8, 0.01, 0.01, 0.0, 0.0};
    ComplexField v = constant(g, {0, 0});
    ComplexField b = constant(g, {1, 0});
    CHECK_THROWS_AS((void)integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 0, 0), ParseError);
}

TEST_CASE("quadratic differential closed form on constants") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    SpinorField s = constant_spinor(g, {1, 0}, {1, 0});
    ComplexField at = ar_differential(s, 0.5);
    // derivative terms vanish; (2Hi/(2H+i)) psi1^2 conj(psi2)^2 = i/(1+i) = (1+i)/2
    for (const cd& z : at.val) CHECK(std::abs(z - cd{0.5, 0.5}) <= 1e-14);
}

TEST_CASE("spinor seed validation") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    ComplexField v = constant(g, {0, 0});
    ComplexField b = constant(g, {1, 0});
    Vec2 bad{cd{std::nan(""), 0}, cd{0, 0}};
    CHECK_THROWS_AS((void)integrate_gw(v, b, bad, 0, 0), ParseError);
    CHECK_THROWS_AS((void)integrate_gw(v, b, Vec2{cd{1, 0}, cd{0, 0}}, 8, 0), ParseError);
}
