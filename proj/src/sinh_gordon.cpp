#include "nilcmc/sinh_gordon.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace nilcmc {

namespace {

using State2 = std::array<double, 2>;
using State4 = std::array<double, 4>;

State2 rhs_minimal(const State2& s) {
    return {s[1], 8.0 * std::sinh(2.0 * s[0])};
}

State4 rhs_coupled(const State4& s) {
    return {s[1], -8.0 * std::sinh(2.0 * s[0]) * std::cos(2.0 * s[2]),
            s[3], -8.0 * std::cosh(2.0 * s[0]) * std::sin(2.0 * s[2])};
}

template <std::size_t N>
std::array<double, N> axpy(const std::array<double, N>& a, double h, const std::array<double, N>& b) {
    std::array<double, N> r;
    for (std::size_t k = 0; k < N; ++k) r[k] = a[k] + h * b[k];
    return r;
}

template <std::size_t N, class Rhs>
std::array<double, N> rk4(const std::array<double, N>& s, double h, Rhs rhs) {
    auto k1 = rhs(s);
    auto k2 = rhs(axpy(s, h / 2.0, k1));
    auto k3 = rhs(axpy(s, h / 2.0, k2));
    auto k4 = rhs(axpy(s, h, k3));
    std::array<double, N> r;
    for (std::size_t k = 0; k < N; ++k)
        r[k] = s[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    return r;
}

} // namespace

ProfileResult solve_constrained_profile(const ConstraintSpec& spec, double rho0, double phi0,
                                        const GridSpec& grid, int anchor_i,
                                        const ProfileOptions& opt) {
    spec.validate();
    grid.validate();
    if (anchor_i < 0 || anchor_i >= grid.nx)
        throw ParseError("anchor column outside grid");

    const int nx = grid.nx;
    const double h = grid.hx;
    std::vector<double> rho(nx), phi(nx);
    double drift = 0.0;

    auto guard = [&](double r, int col) {
        if (!(std::fabs(r) <= opt.rho_guard))
            throw NormGuardError("rho guard tripped at column " + std::to_string(col)
                                 + ": |rho| = " + fmt17(std::fabs(r)));
    };

    std::string note;
    if (spec.mode == Mode::Minimal) {
        // phi is pinned; the imaginary part of the 1D system decouples completely
        const double E0 = opt.drho0 * opt.drho0 - 8.0 * std::cosh(2.0 * rho0);
        for (int dir : {+1, -1}) {
            State2 s{rho0, opt.drho0};
            rho[anchor_i] = s[0];
            const double hh = dir * h;
            for (int k = anchor_i; dir > 0 ? k < nx - 1 : k > 0; k += dir) {
                s = rk4(s, hh, rhs_minimal);
                guard(s[0], k + dir);
                rho[k + dir] = s[0];
                const double E = s[1] * s[1] - 8.0 * std::cosh(2.0 * s[0]);
                drift = std::max(drift, std::fabs(E - E0));
            }
        }
        for (int i = 0; i < nx; ++i) phi[i] = std::numbers::pi / 2.0;
        note = "phi pinned to pi/2; energy drift " + fmt17(drift);
    } else {
        const double c = spec.c();
        const double rad = 8.0 * (std::cos(2.0 * phi0) - c);
        if (rad < 0.0)
            throw InadmissibleError("inadmissible initial data: phi'(0) radicand = " + fmt17(rad));
        const double dphi0 = opt.sign * std::cosh(rho0) * std::sqrt(rad);
        auto cval = [&](const State4& s) {
            const double ch = std::cosh(s[0]);
            return s[3] * s[3] / (ch * ch) - 8.0 * (std::cos(2.0 * s[2]) - c);
        };
        for (int dir : {+1, -1}) {
            State4 s{rho0, opt.drho0, phi0, dphi0};
            rho[anchor_i] = s[0];
            phi[anchor_i] = s[2];
            const double hh = dir * h;
            for (int k = anchor_i; dir > 0 ? k < nx - 1 : k > 0; k += dir) {
                s = rk4(s, hh, rhs_coupled);
                guard(s[0], k + dir);
                if (opt.project) {
                    const double r2 = 8.0 * (std::cos(2.0 * s[2]) - c);
                    if (r2 >= 0.0)
                        s[3] = std::copysign(std::cosh(s[0]) * std::sqrt(r2), s[3]);
                }
                rho[k + dir] = s[0];
                phi[k + dir] = s[2];
                drift = std::max(drift, std::fabs(cval(s)));
            }
        }
        note = "continuous phi branch from phi0=" + fmt17(phi0)
               + (opt.sign >= 0 ? ", sign +1" : ", sign -1")
               + (opt.project ? ", projected" : "")
               + "; constraint drift " + fmt17(drift);
    }

    ProfileResult out;
    out.pot.v = ComplexField(grid);
    out.pot.H = spec.H;
    out.pot.mode = spec.mode;
    out.drift = drift;
    double ms = std::fabs(std::sinh(rho[0]));
    for (int i = 0; i < nx; ++i) ms = std::min(ms, std::fabs(std::sinh(rho[i])));
    out.min_abs_sinh_rho = ms;
    out.pot.branch_note = note + "; min|sinh rho| " + fmt17(ms);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.pot.v.at(i, j) = cd{rho[i], phi[i]};
    return out;
}

ComplexField sinh_gordon_residual_field(const ComplexField& v, LaplacianForm form) {
    ComplexField lap = laplacian(v, form);
    ComplexField out(v.grid);
    for (std::size_t k = 0; k < out.val.size(); ++k)
        out.val[k] = lap.val[k] + 8.0 * std::sinh(2.0 * v.val[k]);
    return out;
}

ComplexField compatibility_residual_field(const ComplexField& v, const ComplexField& B) {
    require_same_grid(v.grid, B.grid, "compatibility residual");
    require_finite(B, "compatibility B");
    ComplexField lap = laplacian(v, LaplacianForm::Composite);
    ComplexField out(v.grid);
    for (std::size_t k = 0; k < out.val.size(); ++k) {
        const cd twov = 2.0 * v.val[k];
        out.val[k] = 0.25 * lap.val[k] + std::exp(twov)
                     - std::norm(B.val[k]) * std::exp(-twov);
    }
    return out;
}

RealField constraint_residual_field(const PotentialLog& pot, const ConstraintSpec& spec,
                                    double eps_sinh) {
    spec.validate();
    require_finite(pot.v, "constraint input v");
    const GridSpec& g = pot.v.grid;
    RealField out(g);
    if (spec.mode == Mode::Minimal) {
        for (std::size_t k = 0; k < out.val.size(); ++k)
            out.val[k] = std::exp(pot.v.val[k]).real();
        return out;
    }
    RealField phi(g);
    for (std::size_t k = 0; k < phi.val.size(); ++k) phi.val[k] = pot.v.val[k].imag();
    RealField px = dx(phi), py = dy(phi);
    const double c = spec.c();
    std::string bad;
    int nbad = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double rho = pot.v.at(i, j).real();
            const double sh = std::sinh(rho), ch = std::cosh(rho);
            if (std::fabs(sh) <= eps_sinh) {
                if (++nbad <= 8)
                    bad += (bad.empty() ? "" : " ") + std::to_string(i) + "," + std::to_string(j);
                continue;
            }
            const double a = px.at(i, j) / ch, b = py.at(i, j) / sh;
            out.at(i, j) = a * a + b * b - 8.0 * (std::cos(2.0 * phi.at(i, j)) - c);
        }
    if (nbad > 0)
        throw InadmissibleError("sinh rho below " + fmt17(eps_sinh) + " at " + std::to_string(nbad)
                                + " node(s): " + bad + (nbad > 8 ? " ..." : ""));
    return out;
}

cd ar_coefficient_constant(double H) {
    return cd{2.0 * H, 1.0} / cd{2.0 * H, -1.0};
}

} // namespace nilcmc
