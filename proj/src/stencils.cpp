#include "nilcmc/stencils.hpp"

namespace nilcmc {

namespace {
void check(const ComplexField& f, const char* what) {
    f.grid.validate();
    require_finite(f, what);
}
void check(const RealField& f, const char* what) {
    f.grid.validate();
    require_finite(f, what);
}
} // namespace

ComplexField dx(const ComplexField& f) { check(f, "dx input"); return detail::d1_x(f); }
ComplexField dy(const ComplexField& f) { check(f, "dy input"); return detail::d1_y(f); }
ComplexField d2x(const ComplexField& f) { check(f, "d2x input"); return detail::d2_x(f); }
ComplexField d2y(const ComplexField& f) { check(f, "d2y input"); return detail::d2_y(f); }
RealField dx(const RealField& f) { check(f, "dx input"); return detail::d1_x(f); }
RealField dy(const RealField& f) { check(f, "dy input"); return detail::d1_y(f); }
RealField d2x(const RealField& f) { check(f, "d2x input"); return detail::d2_x(f); }
RealField d2y(const RealField& f) { check(f, "d2y input"); return detail::d2_y(f); }

// Components written out so the two operators share every floating-point operation;
// conjugation symmetry then holds exactly, not just to roundoff.
ComplexField wirtinger_dz(const ComplexField& f) {
    check(f, "wirtinger_dz input");
    ComplexField gx = detail::d1_x(f), gy = detail::d1_y(f);
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < out.val.size(); ++k)
        out.val[k] = cd{0.5 * (gx.val[k].real() + gy.val[k].imag()),
                        0.5 * (gx.val[k].imag() - gy.val[k].real())};
    return out;
}

ComplexField wirtinger_dzbar(const ComplexField& f) {
    check(f, "wirtinger_dzbar input");
    ComplexField gx = detail::d1_x(f), gy = detail::d1_y(f);
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < out.val.size(); ++k)
        out.val[k] = cd{0.5 * (gx.val[k].real() - gy.val[k].imag()),
                        0.5 * (gx.val[k].imag() + gy.val[k].real())};
    return out;
}

ComplexField laplacian(const ComplexField& f, LaplacianForm form) {
    check(f, "laplacian input");
    ComplexField a, b;
    if (form == LaplacianForm::FivePoint) {
        a = detail::d2_x(f);
        b = detail::d2_y(f);
    } else {
        a = detail::d1_x(detail::d1_x(f));
        b = detail::d1_y(detail::d1_y(f));
    }
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < out.val.size(); ++k) out.val[k] = a.val[k] + b.val[k];
    return out;
}

} // namespace nilcmc
