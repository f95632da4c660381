#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nilcmc/reality.hpp"
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

double absmax_mats(const RealityDerivatives& d) {
    double m = 0.0;
    for (const std::vector<Mat2>* mats : {&d.D1, &d.D2})
        for (const Mat2& mm : *mats)
            m = std::max({m, std::abs(mm.a), std::abs(mm.b), std::abs(mm.c), std::abs(mm.d)});
    return m;
}

} // namespace

TEST_CASE("hermitian form diagonal closed forms") {
    GridSpec g{4, 4, 0.1, 0.1, 0.0, 0.0};
    auto [w1, w2] = reality_matrix_diag(constant(g, {0, 0}), 0.5);
    CHECK(std::abs(w1.at(1, 1) - cd{0.25, -0.25}) <= 1e-15);
    CHECK(std::abs(w2.at(1, 1) - cd{0.25, 0.25}) <= 1e-15);

    auto [u1, u2] = reality_matrix_diag(constant(g, {0, 0}), 0.0);
    CHECK(std::abs(u1.at(1, 1) - cd{0, -0.25}) <= 1e-15);
    CHECK(std::abs(u2.at(1, 1) - cd{0, 0.25}) <= 1e-15);

    auto [t1, t2] = reality_matrix_diag(constant(g, {std::log(3.0), 0}), 1.0);
    CHECK(std::abs(t1.at(1, 1) - cd{2.0 / 12.0, -1.0 / 12.0}) <= 1e-15);
    CHECK(std::abs(t2.at(1, 1) - cd{2.0 / 12.0, 1.0 / 12.0}) <= 1e-15);
}

TEST_CASE("the quadratic form is 1/2 for the unit diagonal spinor at v = 0, H = 1/2") {
    GridSpec g{4, 4, 0.1, 0.1, 0.0, 0.0};
    ComplexField q = reality_quadratic(constant_spinor(g, {1, 0}, {1, 0}), constant(g, {0, 0}), 0.5);
    for (const cd& z : q.val) CHECK(std::abs(z - cd{0.5, 0.0}) <= 1e-15);
}

TEST_CASE("tau and sigma are real for arbitrary potentials") {
    GridSpec g{12, 12, 0.05, 0.05, -0.3, -0.3};
    std::mt19937 gen(4242);
    auto u = [&] { return gen() * (1.0 / 4294967296.0) * 2.0 - 1.0; };
    for (double h : {0.2, 0.5, 1.5}) {
        ComplexField v(g);
        for (cd& z : v.val) z = cd{u(), u()};
        RealityCoeffs rc = reality_coefficients(v, h);
        double scale = 0.0, imax = 0.0;
        for (size_t k = 0; k < rc.tau.val.size(); ++k) {
            scale = std::max({scale, std::abs(rc.tau.val[k]), std::abs(rc.sigma.val[k])});
            imax = std::max({imax, std::abs(rc.tau.val[k].imag()),
                             std::abs(rc.sigma.val[k].imag())});
        }
        CHECK(imax <= 1e-13 * std::max(1.0, scale));
    }
}

TEST_CASE("v = 0 gives tau = sigma = -2 and kappa = 0 for every H") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    for (double h : {0.0, 0.5, 1.0, 2.0}) {
        RealityCoeffs rc = reality_coefficients(constant(g, {0, 0}), h);
        for (size_t k = 0; k < rc.tau.val.size(); ++k) {
            CHECK(std::abs(rc.tau.val[k] - cd{-2.0, 0.0}) <= 1e-14);
            CHECK(std::abs(rc.sigma.val[k] - cd{-2.0, 0.0}) <= 1e-14);
            CHECK(std::abs(rc.kappa.val[k]) <= 1e-14);
        }
    }
}

TEST_CASE("minimal profiles annihilate both derivative matrices exactly") {
    GridSpec g{64, 8, 0.005, 0.005, -0.16, 0.0};
    ProfileResult r = solve_constrained_profile(ConstraintSpec{Mode::Minimal, 0.0}, 0.2, 0.0, g, 32);
    ComplexField b = constant(g, ar_coefficient_constant(0.0));
    RealityDerivatives d = reality_derivative_matrices_explicit(r.pot.v, b, 0.0);
    CHECK(absmax_mats(d) <= 1e-12);
}

TEST_CASE("explicit and defining derivative matrices converge at second order") {
    auto dev = [](int n, double h) {
        GridSpec g{n, n, h, h, -0.3, -0.3};
        ComplexField v(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = g.x(i), y = g.y(j);
                v.at(i, j) = cd{0.3 * std::sin(2.0 * x) * std::cosh(y),
                                0.4 + 0.2 * std::cos(x + 2.0 * y)};
            }
        ComplexField b = constant(g, ar_coefficient_constant(0.5));
        RealityDerivatives de = reality_derivative_matrices_explicit(v, b, 0.5);
        RealityDerivatives dd = reality_derivative_matrices_defining(v, b, 0.5);
        RealityDerivatives diff{de.grid, de.D1, de.D2};
        for (size_t k = 0; k < de.D1.size(); ++k) {
            diff.D1[k] = de.D1[k] - dd.D1[k];
            diff.D2[k] = de.D2[k] - dd.D2[k];
        }
        double m = 0.0;
        for (bool first : {true, false}) {
            RealField dmax = matfield_absmax(diff, first);
            // interior only: edge closures converge too but with a bigger constant
            for (int j = 1; j + 1 < g.ny; ++j)
                for (int i = 1; i + 1 < g.nx; ++i) m = std::max(m, dmax.at(i, j));
        }
        return m;
    };
    double coarse = dev(31, 0.02), fine = dev(61, 0.01);
    CHECK(estimate_order(coarse, fine) >= 1.9);
}

TEST_CASE("xi recovery flags constants everywhere") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    ComplexField v = constant(g, {0.1, 0.3});
    ComplexField b = constant(g, ar_coefficient_constant(0.5));
    XiResult xi = xi_recovery(v, b, 0.5);
    CHECK(xi.flagged == g.size()); // kappa = 0 on constant data
    for (double r : xi.residual.val) CHECK(r == 0.0);
    for (const cd& z : xi.xi.val) CHECK(z == cd{0.0, 0.0});
}

TEST_CASE("xi recovery refuses the minimal case") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    ComplexField v = constant(g, {0.1, 0.3});
    ComplexField b = constant(g, {-1, 0});
    CHECK_THROWS_AS((void)xi_recovery(v, b, 0.0), InadmissibleError);
}

TEST_CASE("amplitude recovery closed forms") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};

    // H = 1/2, |xi|^2 = 3, e^v = 1 + i/2: l = 1 and the imaginary part matches
    ComplexField v = constant(g, std::log(cd{1.0, 0.5}));
    ComplexField xi = constant(g, {std::sqrt(3.0), 0.0});
    AmplitudeResult a = amplitude_recovery(v, xi, 0.5);
    CHECK(a.flagged == 0);
    for (double l : a.l.val) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
    for (double d : a.im_defect.val) CHECK(d <= 1e-12);

    // xi = 0, H = 1, e^v = 1: l = 2 and the defect is |0 - (2/4)(-1)| = 1/2
    AmplitudeResult a2 = amplitude_recovery(constant(g, {0, 0}), constant(g, {0, 0}), 1.0);
    CHECK(a2.flagged == 0);
    for (double l : a2.l.val) CHECK(l == doctest::Approx(2.0).epsilon(1e-12));
    for (double d : a2.im_defect.val) CHECK(d == doctest::Approx(0.5).epsilon(1e-12));

    // Re e^v < 0 is inadmissible for H > 0
    AmplitudeResult a3 = amplitude_recovery(constant(g, {0, kPi}), constant(g, {0, 0}), 1.0);
    CHECK(a3.flagged == g.size());
}

TEST_CASE("tau and sigma magnitudes factor through the branch gaps") {
    // |sigma| = |2H+i||e^v| |e^{+(vbar-v)} - (2H-i)/(2H+i)| and |tau| uses the - branch;
    // this factorization is what makes the xi-recovery flag floor scale-aware.
    GridSpec g{16, 8, 0.05, 0.05, 0.0, 0.0};
    ComplexField v(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            v.at(i, j) = cd{0.1 + 0.02 * g.y(j), 0.2 + 0.3 * std::sin(g.x(i))};
    RealityCoeffs rc = reality_coefficients(v, 0.5);
    const cd ratio = cd{1.0, -1.0} / cd{1.0, 1.0}; // (2H-i)/(2H+i) at H = 1/2
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            cd w = std::conj(v.at(i, j)) - v.at(i, j);
            double scale = std::abs(cd{1.0, 1.0}) * std::abs(std::exp(v.at(i, j)));
            double gap_p = std::abs(std::exp(w) - ratio);
            double gap_m = std::abs(std::exp(-w) - ratio);
            CHECK(std::abs(rc.sigma.at(i, j)) == doctest::Approx(scale * gap_p).epsilon(1e-10));
            CHECK(std::abs(rc.tau.at(i, j)) == doctest::Approx(scale * gap_m).epsilon(1e-10));
        }
}
