#include "nilcmc/spinor.hpp"

#include <cmath>

namespace nilcmc {

FrameCoeffs frame_coefficients(const SpinorField& psi) {
    psi.validate();
    const GridSpec& g = psi.grid();
    FrameCoeffs c{ComplexField(g), ComplexField(g), ComplexField(g)};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cd p1 = psi.psi1.val[k];
        const cd p2b = std::conj(psi.psi2.val[k]);
        c.alpha.val[k] = cd{0.0, 0.5} * (p2b * p2b + p1 * p1);
        c.beta.val[k] = 0.5 * (p2b * p2b - p1 * p1);
        c.gamma.val[k] = p1 * p2b;
    }
    return c;
}

ComplexField conformality_residual_field(const SpinorField& psi) {
    FrameCoeffs c = frame_coefficients(psi);
    ComplexField out(psi.grid());
    for (std::size_t k = 0; k < out.val.size(); ++k)
        out.val[k] = c.alpha.val[k] * c.alpha.val[k] + c.beta.val[k] * c.beta.val[k]
                     + c.gamma.val[k] * c.gamma.val[k];
    return out;
}

RealField conformal_factor_field(const SpinorField& psi) {
    FrameCoeffs c = frame_coefficients(psi);
    RealField out(psi.grid());
    for (std::size_t k = 0; k < out.val.size(); ++k)
        out.val[k] = std::norm(c.alpha.val[k]) + std::norm(c.beta.val[k])
                     + std::norm(c.gamma.val[k]);
    return out;
}

ComplexField dirac_potential(const SpinorField& psi, double H) {
    psi.validate();
    ComplexField out(psi.grid());
    for (std::size_t k = 0; k < out.val.size(); ++k) {
        const double n1 = std::norm(psi.psi1.val[k]);
        const double n2 = std::norm(psi.psi2.val[k]);
        out.val[k] = cd{0.5 * H * (n1 + n2), 0.25 * (n2 - n1)};
    }
    return out;
}

std::pair<ComplexField, ComplexField> dirac_residual_fields(const SpinorField& psi,
                                                            const ComplexField& U) {
    psi.validate();
    require_same_grid(psi.grid(), U.grid, "dirac residual");
    ComplexField r1 = wirtinger_dz(psi.psi2);
    ComplexField r2 = wirtinger_dzbar(psi.psi1);
    for (std::size_t k = 0; k < r1.val.size(); ++k) {
        r1.val[k] += U.val[k] * psi.psi1.val[k];
        r2.val[k] = -r2.val[k] + U.val[k] * psi.psi2.val[k];
    }
    return {std::move(r1), std::move(r2)};
}

ComplexField ar_differential(const SpinorField& psi, double H) {
    psi.validate();
    const cd hfac = cd{0.0, 2.0 * H} / cd{2.0 * H, 1.0};
    ComplexField p2b = conj_field(psi.psi2);
    ComplexField d1 = wirtinger_dz(psi.psi1);
    ComplexField d2b = wirtinger_dz(p2b);
    ComplexField out(psi.grid());
    for (std::size_t k = 0; k < out.val.size(); ++k) {
        const cd p1 = psi.psi1.val[k], q = p2b.val[k];
        out.val[k] = q * d1.val[k] - p1 * d2b.val[k] + hfac * p1 * p1 * q * q;
    }
    return out;
}

std::pair<ComplexField, ComplexField> derivative_identity_residuals(const SpinorField& psi,
                                                                    const ComplexField& v,
                                                                    double H) {
    psi.validate();
    require_same_grid(psi.grid(), v.grid, "derivative identities");
    ComplexField at = ar_differential(psi, H);
    ComplexField vz = wirtinger_dz(v);
    ComplexField vzb = wirtinger_dzbar(v);
    ComplexField d1 = wirtinger_dz(psi.psi1);
    ComplexField d2 = wirtinger_dzbar(psi.psi2);
    const cd cp = 0.25 * cd{2.0 * H, 1.0};
    const cd cm = 0.25 * cd{2.0 * H, -1.0};
    ComplexField r1(psi.grid()), r2(psi.grid());
    for (std::size_t k = 0; k < r1.val.size(); ++k) {
        const cd emv = std::exp(-v.val[k]);
        r1.val[k] = d1.val[k] - (vz.val[k] * psi.psi1.val[k]
                                 + cp * at.val[k] * emv * psi.psi2.val[k]);
        r2.val[k] = d2.val[k] - (-cm * emv * std::conj(at.val[k]) * psi.psi1.val[k]
                                 + vzb.val[k] * psi.psi2.val[k]);
    }
    return {std::move(r1), std::move(r2)};
}

} // namespace nilcmc
