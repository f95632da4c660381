#pragma once

#include <array>

namespace nilcmc {

struct NilPoint {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
};

/// Group law of the upper-triangular matrix model: third coordinate picks up a1*b2.
NilPoint group_mul(const NilPoint& a, const NilPoint& b);
NilPoint group_inv(const NilPoint& a);

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

/// Left-invariant metric ds^2 = dx1^2 + dx2^2 + (dx3 - x1 dx2)^2; depends on x1 only.
Mat3 metric_at(double x1);
Mat3 metric_inverse_at(double x1);
double metric_det(double x1);

/// Christoffel symbols [k][i][j] of the metric above.
std::array<Mat3, 3> christoffel_at(double x1);

/// Orthonormal left-invariant frame in coordinates: rows E1, E2, E3.
Mat3 left_frame(double x1);

/// Covariant acceleration Gamma^k_ij u^i u^j of a curve with velocity u at x1;
/// zero exactly for straight lines along the x1 and x3 axes.
Vec3 geodesic_accel(double x1, const Vec3& u);

double metric_dot(const Mat3& g, const Vec3& a, const Vec3& b);

} // namespace nilcmc
