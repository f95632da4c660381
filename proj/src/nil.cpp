#include "nilcmc/nil.hpp"

namespace nilcmc {

NilPoint group_mul(const NilPoint& a, const NilPoint& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3 + a.x1 * b.x2};
}

NilPoint group_inv(const NilPoint& a) {
    return {-a.x1, -a.x2, -a.x3 + a.x1 * a.x2};
}

Mat3 metric_at(double x1) {
    return {{{1.0, 0.0, 0.0},
             {0.0, 1.0 + x1 * x1, -x1},
             {0.0, -x1, 1.0}}};
}

Mat3 metric_inverse_at(double x1) {
    return {{{1.0, 0.0, 0.0},
             {0.0, 1.0, x1},
             {0.0, x1, 1.0 + x1 * x1}}};
}

double metric_det(double x1) {
    const Mat3 g = metric_at(x1);
    return g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1])
           - g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0])
           + g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
}

std::array<Mat3, 3> christoffel_at(double x1) {
    std::array<Mat3, 3> G{};
    G[0][1][1] = -x1;
    G[0][1][2] = 0.5;
    G[0][2][1] = 0.5;
    G[1][0][1] = 0.5 * x1;
    G[1][1][0] = 0.5 * x1;
    G[1][0][2] = -0.5;
    G[1][2][0] = -0.5;
    G[2][0][1] = 0.5 * (x1 * x1 - 1.0);
    G[2][1][0] = 0.5 * (x1 * x1 - 1.0);
    G[2][0][2] = -0.5 * x1;
    G[2][2][0] = -0.5 * x1;
    return G;
}

Mat3 left_frame(double x1) {
    return {{{1.0, 0.0, 0.0},
             {0.0, 1.0, x1},
             {0.0, 0.0, 1.0}}};
}

Vec3 geodesic_accel(double x1, const Vec3& u) {
    const std::array<Mat3, 3> G = christoffel_at(x1);
    Vec3 acc{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                acc[k] += G[k][i][j] * u[i] * u[j];
    return acc;
}

double metric_dot(const Mat3& g, const Vec3& a, const Vec3& b) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += a[i] * g[i][j] * b[j];
    return s;
}

} // namespace nilcmc
