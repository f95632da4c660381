#include "nilcmc/reality.hpp"

#include <cmath>

namespace nilcmc {

RealityCoeffs reality_coefficients(const ComplexField& v, double H) {
    require_finite(v, "reality v");
    const cd a{2.0 * H, -1.0}, b{2.0 * H, 1.0};
    const cd mi{0.0, -1.0};
    const GridSpec& g = v.grid;
    RealityCoeffs rc{ComplexField(g), ComplexField(g), ComplexField(g)};
    ComplexField vdiff(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const cd ev = std::exp(v.val[k]);
        const cd evb = std::exp(std::conj(v.val[k]));
        rc.tau.val[k] = mi * (a * evb - b * ev);
        rc.sigma.val[k] = mi * (a * ev - b * evb);
        vdiff.val[k] = std::conj(v.val[k]) - v.val[k];
    }
    ComplexField dzd = wirtinger_dz(vdiff);
    for (std::size_t k = 0; k < g.size(); ++k) rc.kappa.val[k] = b * dzd.val[k];
    return rc;
}

std::pair<ComplexField, ComplexField> reality_matrix_diag(const ComplexField& v, double H) {
    require_finite(v, "reality matrix v");
    const cd a{2.0 * H, -1.0}, b{2.0 * H, 1.0};
    ComplexField w1(v.grid), w2(v.grid);
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const cd emv = std::exp(-v.val[k]);
        w1.val[k] = 0.25 * a * emv;
        w2.val[k] = 0.25 * b * emv;
    }
    return {std::move(w1), std::move(w2)};
}

ComplexField reality_quadratic(const SpinorField& psi, const ComplexField& v, double H) {
    psi.validate();
    require_same_grid(psi.grid(), v.grid, "reality quadratic");
    auto [w1, w2] = reality_matrix_diag(v, H);
    ComplexField q(v.grid);
    for (std::size_t k = 0; k < q.val.size(); ++k)
        q.val[k] = w1.val[k] * std::norm(psi.psi1.val[k]) + w2.val[k] * std::norm(psi.psi2.val[k]);
    return q;
}

RealityDerivatives reality_derivative_matrices_explicit(const ComplexField& v,
                                                        const ComplexField& B, double H) {
    require_same_grid(v.grid, B.grid, "reality derivatives");
    RealityCoeffs rc = reality_coefficients(v, H);
    const cd I{0.0, 1.0};
    RealityDerivatives d;
    d.grid = v.grid;
    d.D1.resize(v.grid.size());
    d.D2.resize(v.grid.size());
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const cd emv = std::exp(-v.val[k]);
        const double ev2 = std::norm(std::exp(v.val[k]));
        const cd it = I * rc.tau.val[k], is = I * rc.sigma.val[k];
        const cd f = 0.25 * emv;
        d.D1[k] = {cd{0.0, 0.0}, f * (it * B.val[k] / ev2), f * it, f * rc.kappa.val[k]};
        d.D2[k] = {f * (-std::conj(rc.kappa.val[k])), f * is,
                   f * (is * std::conj(B.val[k]) / ev2), cd{0.0, 0.0}};
    }
    return d;
}

namespace {

Mat2 conj_transpose(const Mat2& m) {
    return {std::conj(m.a), std::conj(m.c), std::conj(m.b), std::conj(m.d)};
}
// W diagonal: right-multiplying scales columns, left-multiplying scales rows
Mat2 mul_diag_right(const Mat2& m, cd w1, cd w2) { return {m.a * w1, m.b * w2, m.c * w1, m.d * w2}; }
Mat2 diag_mul(cd w1, cd w2, const Mat2& m) { return {w1 * m.a, w1 * m.b, w2 * m.c, w2 * m.d}; }

} // namespace

RealityDerivatives reality_derivative_matrices_defining(const ComplexField& v,
                                                        const ComplexField& B, double H) {
    require_same_grid(v.grid, B.grid, "reality derivatives");
    GWMatrices m = gw_matrices(v, B);
    auto [w1, w2] = reality_matrix_diag(v, H);
    ComplexField dw1 = wirtinger_dz(w1), dw2 = wirtinger_dz(w2);
    ComplexField db1 = wirtinger_dzbar(w1), db2 = wirtinger_dzbar(w2);
    RealityDerivatives d;
    d.grid = v.grid;
    d.D1.resize(v.grid.size());
    d.D2.resize(v.grid.size());
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const Mat2 dW{dw1.val[k], cd{}, cd{}, dw2.val[k]};
        const Mat2 dbW{db1.val[k], cd{}, cd{}, db2.val[k]};
        d.D1[k] = mul_diag_right(conj_transpose(m.M2[k]), w1.val[k], w2.val[k]) + dW
                  + diag_mul(w1.val[k], w2.val[k], m.M1[k]);
        d.D2[k] = mul_diag_right(conj_transpose(m.M1[k]), w1.val[k], w2.val[k]) + dbW
                  + diag_mul(w1.val[k], w2.val[k], m.M2[k]);
    }
    return d;
}

RealField matfield_absmax(const RealityDerivatives& d, bool first) {
    const std::vector<Mat2>& m = first ? d.D1 : d.D2;
    RealField out(d.grid);
    for (std::size_t k = 0; k < m.size(); ++k)
        out.val[k] = std::max(std::max(std::abs(m[k].a), std::abs(m[k].b)),
                              std::max(std::abs(m[k].c), std::abs(m[k].d)));
    return out;
}

XiResult xi_recovery(const ComplexField& v, const ComplexField& B, double H,
                     const XiOptions& opt) {
    require_same_grid(v.grid, B.grid, "xi recovery");
    if (H == 0.0) throw InadmissibleError("xi recovery requires H != 0");
    XiResult r;
    r.coeffs = reality_coefficients(v, H);
    r.xi = ComplexField(v.grid);
    r.residual = RealField(v.grid);
    r.flags.assign(v.grid.size(), 0);
    const double babs = std::abs(cd{2.0 * H, 1.0});
    const cd I{0.0, 1.0};
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const cd ev = std::exp(v.val[k]);
        const double ev2 = std::norm(ev);
        const double scale = babs * std::abs(ev);
        const double den_fac = 1.0 - std::norm(B.val[k]) / (ev2 * ev2);
        const cd tau = r.coeffs.tau.val[k], sig = r.coeffs.sigma.val[k], kap = r.coeffs.kappa.val[k];
        const double floor_ts = std::max(opt.tol_abs, opt.tol_gap * scale);
        const bool bad = std::abs(tau) < floor_ts || std::abs(sig) < floor_ts
                         || std::abs(kap) < opt.tol_abs || std::fabs(den_fac) < opt.tol_den;
        if (bad) {
            r.flags[k] = 1;
            ++r.flagged;
            continue;
        }
        const cd xi = (std::conj(kap) + kap * std::conj(B.val[k]) / ev2) / (I * sig * den_fac);
        r.xi.val[k] = xi;
        r.residual.val[k] = std::abs(std::norm(xi) - tau / sig);
    }
    return r;
}

AmplitudeResult amplitude_recovery(const ComplexField& v, const ComplexField& xi, double H) {
    require_same_grid(v.grid, xi.grid, "amplitude recovery");
    if (H == 0.0) throw InadmissibleError("amplitude recovery requires H != 0");
    AmplitudeResult r;
    r.l = RealField(v.grid);
    r.im_defect = RealField(v.grid);
    r.flags.assign(v.grid.size(), 0);
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const cd ev = std::exp(v.val[k]);
        const double xin = std::norm(xi.val[k]);
        const double l = 2.0 * ev.real() / (H * (1.0 + xin));
        if (!(l > 0.0)) {
            r.flags[k] = 1;
            ++r.flagged;
            continue;
        }
        r.l.val[k] = l;
        r.im_defect.val[k] = std::fabs(ev.imag() - 0.25 * l * (xin - 1.0));
    }
    return r;
}

} // namespace nilcmc
