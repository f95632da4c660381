#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "nilcmc/field_io.hpp"
#include "nilcmc/report.hpp"
#include "nilcmc/stencils.hpp"

using namespace nilcmc;

namespace {

ComplexField fill(const GridSpec& g, cd (*fn)(double, double)) {
    ComplexField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.at(i, j) = fn(g.x(i), g.y(j));
    return f;
}

double absmax(const ComplexField& f) {
    double m = 0.0;
    for (const cd& z : f.val) m = std::max(m, std::abs(z));
    return m;
}

ComplexField random_field(const GridSpec& g, uint32_t seedval) {
    std::mt19937 gen(seedval);
    auto u = [&] { return gen() * (1.0 / 4294967296.0) * 2.0 - 1.0; };
    ComplexField f(g);
    for (cd& z : f.val) z = cd{u(), u()};
    return f;
}

} // namespace

TEST_CASE("grid index and coordinates") {
    GridSpec g{5, 4, 0.1, 0.2, -1.0, 2.0};
    CHECK(g.size() == 20);
    CHECK(g.idx(0, 0) == 0);
    CHECK(g.idx(4, 0) == 4);
    CHECK(g.idx(0, 1) == 5);
    CHECK(g.x(3) == doctest::Approx(-0.7));
    CHECK(g.y(2) == doctest::Approx(2.4));
    g.validate();
}

TEST_CASE("grid rejects degenerate shapes") {
    CHECK_THROWS_AS((GridSpec{2, 4, 0.1, 0.1, 0, 0}).validate(), ParseError);
    CHECK_THROWS_AS((GridSpec{4, 2, 0.1, 0.1, 0, 0}).validate(), ParseError);
    CHECK_THROWS_AS((GridSpec{4, 4, 0.0, 0.1, 0, 0}).validate(), ParseError);
    CHECK_THROWS_AS((GridSpec{4, 4, 0.1, -0.1, 0, 0}).validate(), ParseError);
}

TEST_CASE("first derivatives exact on quadratics, edge rows included") {
    GridSpec g{12, 11, 0.05, 0.04, -0.3, 0.2};
    // f = zbar^2 depends on both directions and has curvature
    ComplexField f = fill(g, [](double x, double y) { return cd{x, -y} * cd{x, -y}; });
    ComplexField fz = wirtinger_dz(f);
    ComplexField fzb = wirtinger_dzbar(f);
    double dev_z = 0.0, dev_zb = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            dev_z = std::max(dev_z, std::abs(fz.at(i, j)));
            dev_zb = std::max(dev_zb, std::abs(fzb.at(i, j) - 2.0 * cd{g.x(i), -g.y(j)}));
        }
    CHECK(dev_z <= 1e-13);
    CHECK(dev_zb <= 1e-13);
}

TEST_CASE("wirtinger derivatives of z and zbar") {
    GridSpec g{8, 8, 0.1, 0.1, 0.0, 0.0};
    ComplexField z = fill(g, [](double x, double y) { return cd{x, y}; });
    ComplexField zb = fill(g, [](double x, double y) { return cd{x, -y}; });
    CHECK(absmax(wirtinger_dzbar(z)) <= 1e-14);
    CHECK(absmax(wirtinger_dz(zb)) <= 1e-14);
    ComplexField dz_z = wirtinger_dz(z);
    ComplexField dzb_zb = wirtinger_dzbar(zb);
    for (const cd& v : dz_z.val) CHECK(std::abs(v - 1.0) <= 1e-14);
    for (const cd& v : dzb_zb.val) CHECK(std::abs(v - 1.0) <= 1e-14);
}

TEST_CASE("laplacian of x^2 + y^2 is 4 in both forms") {
    GridSpec g{9, 10, 0.07, 0.06, -0.2, -0.1};
    ComplexField f = fill(g, [](double x, double y) { return cd{x * x + y * y, 0.0}; });
    for (LaplacianForm form : {LaplacianForm::FivePoint, LaplacianForm::Composite}) {
        ComplexField lap = laplacian(f, form);
        for (const cd& v : lap.val) CHECK(std::abs(v - 4.0) <= 1e-11);
    }
}

TEST_CASE("composite laplacian is the composition of first derivatives") {
    GridSpec g{10, 9, 0.05, 0.05, 0.0, 0.0};
    ComplexField f = random_field(g, 12345);
    ComplexField lap = laplacian(f, LaplacianForm::Composite);
    ComplexField comp = dx(dx(f));
    ComplexField dyy = dy(dy(f));
    for (size_t k = 0; k < comp.val.size(); ++k) comp.val[k] += dyy.val[k];
    for (size_t k = 0; k < lap.val.size(); ++k) CHECK(lap.val[k] == comp.val[k]);
}

TEST_CASE("derivative order on smooth transcendental data") {
    auto run = [](int n, double h) {
        GridSpec g{n, n, h, h, -0.4, -0.4};
        ComplexField f = fill(g, [](double x, double y) {
            return cd{std::sin(x) * std::sinh(y), 0.0};
        });
        ComplexField d = dx(f);
        double dev = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                dev = std::max(dev, std::abs(d.at(i, j) - std::cos(g.x(i)) * std::sinh(g.y(j))));
        return dev;
    };
    double coarse = run(41, 0.02), fine = run(81, 0.01);
    CHECK(estimate_order(coarse, fine) >= 1.9);

    auto runz = [](int n, double h) {
        GridSpec g{n, n, h, h, -0.4, -0.4};
        ComplexField f = fill(g, [](double x, double y) { return std::exp(cd{x, y}); });
        ComplexField d = wirtinger_dz(f);
        double dev = 0.0;
        for (size_t k = 0; k < d.val.size(); ++k) dev = std::max(dev, std::abs(d.val[k] - f.val[k]));
        return dev;
    };
    // On holomorphic data the h^2 truncation terms of dx and -i*dy cancel
    // (the closures share the central stencil's error constant), so dz is
    // fourth order here rather than second.
    double oz = estimate_order(runz(41, 0.02), runz(81, 0.01));
    CHECK(oz >= 3.5);
    CHECK(oz <= 4.5);
}

TEST_CASE("dzbar is the bitwise conjugate of dz") {
    GridSpec g{17, 13, 0.03, 0.05, -0.2, -0.3};
    ComplexField f = random_field(g, 777);
    ComplexField a = wirtinger_dzbar(f);
    ComplexField b = conj_field(wirtinger_dz(conj_field(f)));
    for (size_t k = 0; k < a.val.size(); ++k) {
        CHECK(a.val[k].real() == b.val[k].real());
        CHECK(a.val[k].imag() == b.val[k].imag());
    }
}

TEST_CASE("derivatives are linear") {
    GridSpec g{11, 11, 0.04, 0.04, 0.0, 0.0};
    ComplexField f = random_field(g, 1), h = random_field(g, 2);
    const cd a{0.7, -0.3}, b{-1.1, 0.2};
    ComplexField combo(g);
    for (size_t k = 0; k < combo.val.size(); ++k) combo.val[k] = a * f.val[k] + b * h.val[k];
    ComplexField lhs = wirtinger_dz(combo);
    ComplexField df = wirtinger_dz(f), dh = wirtinger_dz(h);
    for (size_t k = 0; k < lhs.val.size(); ++k)
        CHECK(std::abs(lhs.val[k] - (a * df.val[k] + b * dh.val[k])) <= 1e-13);
}

TEST_CASE("segment midpoints reproduce cubics exactly") {
    GridSpec g{9, 5, 0.1, 0.1, -0.4, 0.0};
    std::vector<double> f(g.size());
    auto cubic = [](double x) { return ((2.0 * x - 1.0) * x + 3.0) * x - 0.5; };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f[g.idx(i, j)] = cubic(g.x(i));
    std::vector<double> mid = seg_mid_x(f, g);
    for (int j = 0; j < g.ny; ++j)
        for (int k = 0; k + 1 < g.nx; ++k) {
            double xm = g.x(k) + 0.5 * g.hx;
            CHECK(std::abs(mid[static_cast<size_t>(j) * (g.nx - 1) + k] - cubic(xm)) <= 1e-13);
        }

    std::vector<double> fy(g.size());
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) fy[g.idx(i, j)] = cubic(g.y(j));
    std::vector<double> midy = seg_mid_y(fy, g);
    for (int k = 0; k + 1 < g.ny; ++k)
        for (int i = 0; i < g.nx; ++i) {
            double ym = g.y(k) + 0.5 * g.hy;
            CHECK(std::abs(midy[static_cast<size_t>(k) * g.nx + i] - cubic(ym)) <= 1e-13);
        }
}

TEST_CASE("order estimate is log2 of the ratio") {
    CHECK(estimate_order(4.0, 1.0) == doctest::Approx(2.0));
    CHECK(estimate_order(1.0, 0.5) == doctest::Approx(1.0));
    CHECK(estimate_order(0.0, 1.0) == 0.0);
    CHECK(estimate_order(1.0, 0.0) == 0.0);
}

TEST_CASE("field statistics skip the rim and honor exclusion masks") {
    GridSpec g{5, 5, 0.1, 0.1, 0.0, 0.0};
    RealField r(g);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 5; ++i) r.at(i, j) = 100.0; // rim value
    for (int j = 1; j < 4; ++j)
        for (int i = 1; i < 4; ++i) r.at(i, j) = 1.0;
    r.at(2, 2) = 7.0;

    ResidualReport rep = field_report("r", r);
    CHECK(rep.max == 7.0); // the 100s on the rim never enter
    CHECK(rep.flagged == 0);

    std::vector<uint8_t> mask(g.size(), 0);
    mask[g.idx(2, 2)] = 1;
    ResidualReport rep2 = field_report("r", r, StatOptions{1, &mask});
    CHECK(rep2.max == 1.0);
    CHECK(rep2.flagged == 1);

    ResidualReport rep0 = field_report("r", r, StatOptions{0, nullptr});
    CHECK(rep0.max == 100.0);
}

TEST_CASE("cfld round trip is bit exact") {
    GridSpec g{7, 6, 0.013, 0.029, -0.11, 0.37};
    ComplexField f = random_field(g, 2024);
    f.at(3, 2) = cd{1.0 / 3.0, -1e-300};
    f.at(0, 0) = cd{6.02214076e23, 0.1};
    std::string path = (std::filesystem::temp_directory_path() / "roundtrip.cfld").string();
    write_cfld(path, f);
    ComplexField back = read_cfld(path);
    REQUIRE(back.grid == f.grid);
    for (size_t k = 0; k < f.val.size(); ++k) {
        CHECK(back.val[k].real() == f.val[k].real());
        CHECK(back.val[k].imag() == f.val[k].imag());
    }
    std::filesystem::remove(path);
}

TEST_CASE("cfld rejects malformed input") {
    GridSpec g{4, 4, 0.1, 0.1, 0.0, 0.0};
    ComplexField f = random_field(g, 5);
    std::string dir = std::filesystem::temp_directory_path().string();

    f.at(1, 1) = cd{std::nan(""), 0.0};
    CHECK_THROWS_AS(write_cfld(dir + "/bad.cfld", f), ParseError);

    std::string path = dir + "/trunc.cfld";
    write_cfld(path, random_field(g, 6));
    {
        std::ifstream in(path);
        std::string keep, line;
        for (int k = 0; k < 9 && std::getline(in, line); ++k) keep += line + "\n";
        std::ofstream out(path, std::ios::trunc);
        out << keep;
    }
    CHECK_THROWS_AS(read_cfld(path), ParseError);
    CHECK_THROWS_AS(read_cfld(dir + "/does_not_exist.cfld"), ParseError);
    std::filesystem::remove(path);
}

TEST_CASE("fmt17 survives a strtod round trip") {
    for (double x : {1.0 / 3.0, 0.1, 1e300, 5e-324, -2.718281828459045, 0.0}) {
        std::string s = fmt17(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}
