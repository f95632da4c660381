#pragma once

#include <utility>

#include "nilcmc/report.hpp"
#include "nilcmc/stencils.hpp"

namespace nilcmc {

struct SpinorField {
    ComplexField psi1, psi2;

    SpinorField() = default;
    explicit SpinorField(const GridSpec& g) : psi1(g), psi2(g) {}
    SpinorField(ComplexField a, ComplexField b) : psi1(std::move(a)), psi2(std::move(b)) {}

    const GridSpec& grid() const { return psi1.grid; }
    void validate() const {
        require_same_grid(psi1.grid, psi2.grid, "spinor components");
        require_finite(psi1, "psi1");
        require_finite(psi2, "psi2");
    }
};

/// Components of f^{-1} f_z in the left-invariant frame:
/// alpha = (i/2)(conj(psi2)^2 + psi1^2), beta = (1/2)(conj(psi2)^2 - psi1^2),
/// gamma = psi1 conj(psi2).
struct FrameCoeffs {
    ComplexField alpha, beta, gamma;
};

FrameCoeffs frame_coefficients(const SpinorField& psi);

/// alpha^2 + beta^2 + gamma^2; identically zero in exact arithmetic for any spinor.
ComplexField conformality_residual_field(const SpinorField& psi);

/// |alpha|^2 + |beta|^2 + |gamma|^2 = (|psi1|^2 + |psi2|^2)^2 / 2.
RealField conformal_factor_field(const SpinorField& psi);

/// U = (H/2)(|psi1|^2 + |psi2|^2) + (i/4)(|psi2|^2 - |psi1|^2).
ComplexField dirac_potential(const SpinorField& psi, double H);

/// R1 = dz(psi2) + U psi1, R2 = -dzbar(psi1) + U psi2.
std::pair<ComplexField, ComplexField> dirac_residual_fields(const SpinorField& psi,
                                                            const ComplexField& U);

/// The quadratic differential coefficient
/// a~ = conj(psi2) dz(psi1) - psi1 dz(conj(psi2)) + (2Hi/(2H+i)) psi1^2 conj(psi2)^2.
ComplexField ar_differential(const SpinorField& psi, double H);

/// Residuals of the transported spinor's first-derivative identities:
///   dz(psi1)    = v_z psi1 + (1/4)(2H+i) a~ e^{-v} psi2
///   dzbar(psi2) = -(1/4)(2H-i) e^{-v} conj(a~) psi1 + v_zbar psi2
std::pair<ComplexField, ComplexField> derivative_identity_residuals(const SpinorField& psi,
                                                                    const ComplexField& v,
                                                                    double H);

} // namespace nilcmc
