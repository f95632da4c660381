#include "nilcmc/field.hpp"

#include <cmath>

namespace nilcmc {

ComplexField conj_field(const ComplexField& f) {
    ComplexField out(f.grid);
    for (std::size_t k = 0; k < f.val.size(); ++k) out.val[k] = std::conj(f.val[k]);
    return out;
}

void require_finite(const ComplexField& f, const char* what) {
    for (const cd& z : f.val)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw ParseError(std::string("non-finite value in ") + what);
}

void require_finite(const RealField& f, const char* what) {
    for (double x : f.val)
        if (!std::isfinite(x))
            throw ParseError(std::string("non-finite value in ") + what);
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
    if (!(a == b)) throw ParseError(std::string("grid mismatch in ") + what);
}

} // namespace nilcmc
