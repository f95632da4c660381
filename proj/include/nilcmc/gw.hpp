#pragma once

#include <string>
#include <vector>

#include "nilcmc/spinor.hpp"

namespace nilcmc {

struct Mat2 {
    cd a{}, b{}, c{}, d{}; // row-major [[a,b],[c,d]]
};

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}
inline Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
}
inline Mat2 operator*(double s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }
inline Mat2 operator*(cd s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

struct Vec2 {
    cd p1{}, p2{};
};

inline Vec2 apply(const Mat2& m, const Vec2& v) {
    return {m.a * v.p1 + m.b * v.p2, m.c * v.p1 + m.d * v.p2};
}

/// Frame equations in matrix form:
/// M1 = [[v_z, B e^{-v}], [-e^v, 0]], M2 = [[0, e^v], [-conj(B) e^{-v}, v_zbar]].
struct GWMatrices {
    GridSpec grid;
    std::vector<Mat2> M1, M2;
};

GWMatrices gw_matrices(const ComplexField& v, const ComplexField& B);

struct TransportOptions {
    bool row_first = true;     // anchor row, then every column; false swaps the sweep order
    double eps_compat = 1e-6;  // compatibility gate; violation is a warning, not an error
    double norm_guard = 1e12;
};

struct TransportResult {
    SpinorField psi;
    std::vector<std::string> warnings;
};

/// Transports psi0 from the anchor node over the whole grid with classical RK4,
/// psi_x = (M1+M2) psi and psi_y = i(M1-M2) psi, matrix entries interpolated
/// cubically at segment midpoints. psi(anchor) = psi0 exactly.
TransportResult integrate_gw(const ComplexField& v, const ComplexField& B, Vec2 psi0,
                             int anchor_i, int anchor_j, const TransportOptions& opt = {});

} // namespace nilcmc
