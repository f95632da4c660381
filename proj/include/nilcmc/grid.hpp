#pragma once

#include <cstddef>

#include "nilcmc/errors.hpp"

namespace nilcmc {

/// Uniform rectangular grid in the conformal plane.
/// Node (i,j) sits at (x0 + i*hx, y0 + j*hy); storage is row-major with j outer.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;

    double x(int i) const { return x0 + i * hx; }
    double y(int j) const { return y0 + j * hy; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool operator==(const GridSpec&) const = default;

    void validate() const {
        if (nx < 3 || ny < 3)
            throw ParseError("grid must be at least 3x3, got " + std::to_string(nx) + "x" + std::to_string(ny));
        if (!(hx > 0.0) || !(hy > 0.0))
            throw ParseError("grid spacings must be positive");
    }
};

} // namespace nilcmc
