#pragma once

#include <complex>
#include <vector>

#include "nilcmc/grid.hpp"

namespace nilcmc {

using cd = std::complex<double>;

/// Complex scalar sampled on a GridSpec, row-major with j outer.
struct ComplexField {
    GridSpec grid;
    std::vector<cd> val;

    ComplexField() = default;
    explicit ComplexField(const GridSpec& g) : grid(g), val(g.size(), cd{0.0, 0.0}) {}
    ComplexField(const GridSpec& g, std::vector<cd> v) : grid(g), val(std::move(v)) {}

    cd& at(int i, int j) { return val[grid.idx(i, j)]; }
    const cd& at(int i, int j) const { return val[grid.idx(i, j)]; }
};

/// Real scalar on the same layout; used for constraint fields, curvature, masks' statistics.
struct RealField {
    GridSpec grid;
    std::vector<double> val;

    RealField() = default;
    explicit RealField(const GridSpec& g) : grid(g), val(g.size(), 0.0) {}
    RealField(const GridSpec& g, std::vector<double> v) : grid(g), val(std::move(v)) {}

    double& at(int i, int j) { return val[grid.idx(i, j)]; }
    const double& at(int i, int j) const { return val[grid.idx(i, j)]; }
};

ComplexField conj_field(const ComplexField& f);

/// Throws ParseError naming `what` if any entry is NaN or infinite.
void require_finite(const ComplexField& f, const char* what);
void require_finite(const RealField& f, const char* what);

/// Throws ParseError if the two fields do not share a grid.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

} // namespace nilcmc
