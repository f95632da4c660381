#include "nilcmc/report.hpp"

#include <cmath>
#include <complex>
#include <cstdio>

namespace nilcmc {

namespace {

template <class F, class AbsFn>
ResidualReport stats(std::string name, const F& r, const StatOptions& opt, AbsFn mag) {
    const GridSpec& g = r.grid;
    ResidualReport rep;
    rep.name = std::move(name);
    double sum2 = 0.0;
    for (int j = opt.rim; j < g.ny - opt.rim; ++j) {
        for (int i = opt.rim; i < g.nx - opt.rim; ++i) {
            if (opt.exclude && (*opt.exclude)[g.idx(i, j)]) {
                ++rep.flagged;
                continue;
            }
            const double a = mag(r.at(i, j));
            if (a > rep.max) rep.max = a;
            sum2 += a * a;
        }
    }
    rep.l2 = std::sqrt(sum2 * g.hx * g.hy);
    return rep;
}

} // namespace

ResidualReport field_report(std::string name, const ComplexField& r, const StatOptions& opt) {
    return stats(std::move(name), r, opt, [](const cd& z) { return std::abs(z); });
}

ResidualReport field_report(std::string name, const RealField& r, const StatOptions& opt) {
    return stats(std::move(name), r, opt, [](double x) { return std::fabs(x); });
}

double estimate_order(double coarse, double fine) {
    if (!(coarse > 0.0) || !(fine > 0.0)) return 0.0;
    return std::log2(coarse / fine);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace nilcmc
