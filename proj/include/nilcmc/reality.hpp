#pragma once

#include "nilcmc/gw.hpp"

namespace nilcmc {

/// i*tau = (2H-i)e^{vbar} - (2H+i)e^v, i*sigma = (2H-i)e^v - (2H+i)e^{vbar},
/// kappa = (2H+i)(vbar - v)_z. tau and sigma come out real for every v.
struct RealityCoeffs {
    ComplexField tau, sigma, kappa;
};

RealityCoeffs reality_coefficients(const ComplexField& v, double H);

/// Diagonal entries of the Hermitian form W = diag((1/4)(2H-i)e^{-v}, (1/4)(2H+i)e^{-v}).
std::pair<ComplexField, ComplexField> reality_matrix_diag(const ComplexField& v, double H);

/// Q = conj(psi)^t W psi; equals 1 identically on normalized admissible data.
ComplexField reality_quadratic(const SpinorField& psi, const ComplexField& v, double H);

struct RealityDerivatives {
    GridSpec grid;
    std::vector<Mat2> D1, D2;
};

/// Closed forms: D1 = (1/4)e^{-v} [[0, i tau B/|e^v|^2], [i tau, kappa]],
///               D2 = (1/4)e^{-v} [[-conj(kappa), i sigma], [i sigma conj(B)/|e^v|^2, 0]].
RealityDerivatives reality_derivative_matrices_explicit(const ComplexField& v,
                                                        const ComplexField& B, double H);

/// Same matrices assembled from their definition, with finite-difference dW:
/// D1 = conj(M2)^t W + dz(W) + W M1, D2 = conj(M1)^t W + dzbar(W) + W M2.
RealityDerivatives reality_derivative_matrices_defining(const ComplexField& v,
                                                        const ComplexField& B, double H);

/// Entrywise max magnitude per node, for residual statistics over matrix fields.
RealField matfield_absmax(const RealityDerivatives& d, bool first);

struct XiOptions {
    double tol_abs = 1e-8; // absolute floor on |tau|, |sigma|, |kappa|
    double tol_den = 0.05; // on |1 - |B|^2/|e^v|^4|
    double tol_gap = 0.2;  // on |tau|, |sigma| relative to |2H+i||e^v|
};

struct XiResult {
    ComplexField xi;
    RealField residual; // | |xi|^2 - tau/sigma |, zero at flagged nodes
    std::vector<std::uint8_t> flags;
    std::size_t flagged = 0;
    RealityCoeffs coeffs;
};

/// xi = (conj(kappa) + kappa conj(B)/|e^v|^2) / (i sigma (1 - |B|^2/|e^v|^4)).
/// Nodes where any denominator ingredient degenerates are flagged and skipped,
/// never computed through.
XiResult xi_recovery(const ComplexField& v, const ComplexField& B, double H,
                     const XiOptions& opt = {});

struct AmplitudeResult {
    RealField l;         // |psi1|^2 from the real-part equation
    RealField im_defect; // |Im(e^v) - (l/4)(|xi|^2 - 1)|
    std::vector<std::uint8_t> flags;
    std::size_t flagged = 0;
};

/// l = 2 Re(e^v) / (H (1 + |xi|^2)); nodes with l <= 0 are flagged as inadmissible.
AmplitudeResult amplitude_recovery(const ComplexField& v, const ComplexField& xi, double H);

} // namespace nilcmc
