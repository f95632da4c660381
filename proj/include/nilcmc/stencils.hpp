#pragma once

#include <cstddef>
#include <vector>

#include "nilcmc/field.hpp"

namespace nilcmc {

// One-sided closures are truncation-matched to the interior central stencils:
// the 5-point first-derivative edge rule shares the central +h^2/6 f''' term with a
// vanishing h^3 term, and the 5-point second-derivative edge rule shares +h^2/12 f''''.
// Without the matching, quantities differentiated twice lose an order at edge nodes.
namespace detail {

template <class T>
void d1_line(const T* s, T* d, std::ptrdiff_t st, int n, double h) {
    const double h2 = 2.0 * h;
    for (int k = 1; k + 1 < n; ++k)
        d[k * st] = (s[(k + 1) * st] - s[(k - 1) * st]) / h2;
    if (n >= 5) {
        d[0] = (-5.0 * s[0] + 11.0 * s[st] - 10.0 * s[2 * st] + 5.0 * s[3 * st] - s[4 * st]) / h2;
        d[(n - 1) * st] = (5.0 * s[(n - 1) * st] - 11.0 * s[(n - 2) * st] + 10.0 * s[(n - 3) * st]
                           - 5.0 * s[(n - 4) * st] + s[(n - 5) * st]) / h2;
    } else if (n == 4) {
        d[0] = (-4.0 * s[0] + 7.0 * s[st] - 4.0 * s[2 * st] + s[3 * st]) / h2;
        d[3 * st] = (4.0 * s[3 * st] - 7.0 * s[2 * st] + 4.0 * s[st] - s[0]) / h2;
    } else {
        d[0] = (-3.0 * s[0] + 4.0 * s[st] - s[2 * st]) / h2;
        d[2 * st] = (3.0 * s[2 * st] - 4.0 * s[st] + s[0]) / h2;
    }
}

template <class T>
void d2_line(const T* s, T* d, std::ptrdiff_t st, int n, double h) {
    const double hh = h * h;
    for (int k = 1; k + 1 < n; ++k)
        d[k * st] = (s[(k + 1) * st] - 2.0 * s[k * st] + s[(k - 1) * st]) / hh;
    if (n >= 5) {
        d[0] = (3.0 * s[0] - 9.0 * s[st] + 10.0 * s[2 * st] - 5.0 * s[3 * st] + s[4 * st]) / hh;
        d[(n - 1) * st] = (3.0 * s[(n - 1) * st] - 9.0 * s[(n - 2) * st] + 10.0 * s[(n - 3) * st]
                           - 5.0 * s[(n - 4) * st] + s[(n - 5) * st]) / hh;
    } else if (n == 4) {
        d[0] = (2.0 * s[0] - 5.0 * s[st] + 4.0 * s[2 * st] - s[3 * st]) / hh;
        d[3 * st] = (2.0 * s[3 * st] - 5.0 * s[2 * st] + 4.0 * s[st] - s[0]) / hh;
    } else {
        // three nodes: the interior rule evaluated at the ends, exact on quadratics
        d[0] = (s[0] - 2.0 * s[st] + s[2 * st]) / hh;
        d[2 * st] = d[0];
    }
}

template <class F>
F d1_x(const F& f) {
    F out(f.grid);
    for (int j = 0; j < f.grid.ny; ++j)
        d1_line(f.val.data() + f.grid.idx(0, j), out.val.data() + f.grid.idx(0, j), 1, f.grid.nx, f.grid.hx);
    return out;
}

template <class F>
F d1_y(const F& f) {
    F out(f.grid);
    for (int i = 0; i < f.grid.nx; ++i)
        d1_line(f.val.data() + i, out.val.data() + i, f.grid.nx, f.grid.ny, f.grid.hy);
    return out;
}

template <class F>
F d2_x(const F& f) {
    F out(f.grid);
    for (int j = 0; j < f.grid.ny; ++j)
        d2_line(f.val.data() + f.grid.idx(0, j), out.val.data() + f.grid.idx(0, j), 1, f.grid.nx, f.grid.hx);
    return out;
}

template <class F>
F d2_y(const F& f) {
    F out(f.grid);
    for (int i = 0; i < f.grid.nx; ++i)
        d2_line(f.val.data() + i, out.val.data() + i, f.grid.nx, f.grid.ny, f.grid.hy);
    return out;
}

} // namespace detail

ComplexField dx(const ComplexField& f);
ComplexField dy(const ComplexField& f);
ComplexField d2x(const ComplexField& f);
ComplexField d2y(const ComplexField& f);
RealField dx(const RealField& f);
RealField dy(const RealField& f);
RealField d2x(const RealField& f);
RealField d2y(const RealField& f);

/// ∂ = ½(∂x − i∂y), built from the shared real-weight kernels so that
/// wirtinger_dzbar(f) == conj(wirtinger_dz(conj f)) holds bit for bit.
ComplexField wirtinger_dz(const ComplexField& f);
ComplexField wirtinger_dzbar(const ComplexField& f);

/// FivePoint: direct second-difference sum d2x+d2y. Composite: dx(dx)+dy(dy),
/// which agrees node-wise with 4*dz(dzbar(.)) up to roundoff.
enum class LaplacianForm { FivePoint, Composite };

ComplexField laplacian(const ComplexField& f, LaplacianForm form = LaplacianForm::FivePoint);

/// Cubic-interpolated midpoint of each segment [k,k+1] along x (per row) or y (per column).
/// Output sized (nx-1)*ny for x, nx*(ny-1) for y; needs at least 4 nodes along the axis.
template <class T>
std::vector<T> seg_mid_x(const std::vector<T>& F, const GridSpec& g) {
    std::vector<T> out(static_cast<std::size_t>(g.nx - 1) * g.ny);
    for (int j = 0; j < g.ny; ++j) {
        const T* row = F.data() + static_cast<std::size_t>(j) * g.nx;
        T* orow = out.data() + static_cast<std::size_t>(j) * (g.nx - 1);
        for (int k = 0; k + 1 < g.nx; ++k) {
            int s = k - 1;
            if (s < 0) s = 0;
            if (s > g.nx - 4) s = g.nx - 4;
            const int xi = k - s; // 0, 1, or 2
            static const double W[3][4] = {{5, 15, -5, 1}, {-1, 9, 9, -1}, {1, -5, 15, 5}};
            orow[k] = (1.0 / 16.0) * (W[xi][0] * row[s] + W[xi][1] * row[s + 1]
                                      + W[xi][2] * row[s + 2] + W[xi][3] * row[s + 3]);
        }
    }
    return out;
}

template <class T>
std::vector<T> seg_mid_y(const std::vector<T>& F, const GridSpec& g) {
    std::vector<T> out(static_cast<std::size_t>(g.nx) * (g.ny - 1));
    for (int i = 0; i < g.nx; ++i) {
        for (int k = 0; k + 1 < g.ny; ++k) {
            int s = k - 1;
            if (s < 0) s = 0;
            if (s > g.ny - 4) s = g.ny - 4;
            const int xi = k - s;
            static const double W[3][4] = {{5, 15, -5, 1}, {-1, 9, 9, -1}, {1, -5, 15, 5}};
            out[static_cast<std::size_t>(k) * g.nx + i] =
                (1.0 / 16.0) * (W[xi][0] * F[static_cast<std::size_t>(s) * g.nx + i]
                                + W[xi][1] * F[static_cast<std::size_t>(s + 1) * g.nx + i]
                                + W[xi][2] * F[static_cast<std::size_t>(s + 2) * g.nx + i]
                                + W[xi][3] * F[static_cast<std::size_t>(s + 3) * g.nx + i]);
        }
    }
    return out;
}

} // namespace nilcmc
