#include "nilcmc/gw.hpp"

#include <cmath>

#include "nilcmc/sinh_gordon.hpp"

namespace nilcmc {

GWMatrices gw_matrices(const ComplexField& v, const ComplexField& B) {
    require_same_grid(v.grid, B.grid, "gw matrices");
    require_finite(v, "gw v");
    require_finite(B, "gw B");
    ComplexField vz = wirtinger_dz(v);
    ComplexField vzb = wirtinger_dzbar(v);
    GWMatrices m;
    m.grid = v.grid;
    m.M1.resize(v.grid.size());
    m.M2.resize(v.grid.size());
    for (std::size_t k = 0; k < v.val.size(); ++k) {
        const cd ev = std::exp(v.val[k]);
        const cd emv = std::exp(-v.val[k]);
        m.M1[k] = {vz.val[k], B.val[k] * emv, -ev, cd{0.0, 0.0}};
        m.M2[k] = {cd{0.0, 0.0}, ev, -std::conj(B.val[k]) * emv, vzb.val[k]};
    }
    return m;
}

namespace {

Vec2 rk4_step(const Mat2& A0, const Mat2& Am, const Mat2& A1, const Vec2& p, double h) {
    const Vec2 k1 = apply(A0, p);
    const Vec2 k2 = apply(Am, {p.p1 + 0.5 * h * k1.p1, p.p2 + 0.5 * h * k1.p2});
    const Vec2 k3 = apply(Am, {p.p1 + 0.5 * h * k2.p1, p.p2 + 0.5 * h * k2.p2});
    const Vec2 k4 = apply(A1, {p.p1 + h * k3.p1, p.p2 + h * k3.p2});
    return {p.p1 + h / 6.0 * (k1.p1 + 2.0 * k2.p1 + 2.0 * k3.p1 + k4.p1),
            p.p2 + h / 6.0 * (k1.p2 + 2.0 * k2.p2 + 2.0 * k3.p2 + k4.p2)};
}

void guard_check(const Vec2& p, double guard, int i, int j) {
    const double n = std::abs(p.p1) + std::abs(p.p2);
    if (!(n <= guard))
        throw NormGuardError("spinor norm guard tripped at node " + std::to_string(i) + ","
                             + std::to_string(j) + ": |psi| = " + fmt17(n));
}

} // namespace

TransportResult integrate_gw(const ComplexField& v, const ComplexField& B, Vec2 psi0,
                             int anchor_i, int anchor_j, const TransportOptions& opt) {
    const GridSpec& g = v.grid;
    g.validate();
    if (g.nx < 4 || g.ny < 4)
        throw ParseError("transport needs at least 4 nodes per axis for cubic midpoints");
    if (anchor_i < 0 || anchor_i >= g.nx || anchor_j < 0 || anchor_j >= g.ny)
        throw ParseError("anchor outside grid");
    if (!std::isfinite(psi0.p1.real()) || !std::isfinite(psi0.p1.imag())
        || !std::isfinite(psi0.p2.real()) || !std::isfinite(psi0.p2.imag()))
        throw ParseError("non-finite psi0");

    TransportResult out;

    {
        ComplexField compat = compatibility_residual_field(v, B);
        ResidualReport r = field_report("compat", compat);
        if (r.max > opt.eps_compat)
            out.warnings.push_back("compatibility residual " + fmt17(r.max) + " exceeds gate "
                                   + fmt17(opt.eps_compat) + "; transport is path-dependent at this level");
        ComplexField dB = wirtinger_dzbar(B);
        ResidualReport rb = field_report("dzbar_B", dB);
        if (rb.max > opt.eps_compat)
            out.warnings.push_back("dzbar(B) max " + fmt17(rb.max) + " exceeds gate "
                                   + fmt17(opt.eps_compat) + "; B is not holomorphic at this level");
    }

    GWMatrices m = gw_matrices(v, B);
    std::vector<Mat2> Ax(g.size()), Ay(g.size());
    const cd I{0.0, 1.0};
    for (std::size_t k = 0; k < g.size(); ++k) {
        Ax[k] = m.M1[k] + m.M2[k];
        Ay[k] = I * (m.M1[k] - m.M2[k]);
    }
    std::vector<Mat2> AxMidX = seg_mid_x(Ax, g);
    std::vector<Mat2> AyMidY = seg_mid_y(Ay, g);

    auto ax = [&](int i, int j) -> const Mat2& { return Ax[g.idx(i, j)]; };
    auto ay = [&](int i, int j) -> const Mat2& { return Ay[g.idx(i, j)]; };
    auto axm = [&](int k, int j) -> const Mat2& {
        return AxMidX[static_cast<std::size_t>(j) * (g.nx - 1) + k];
    };
    auto aym = [&](int i, int k) -> const Mat2& {
        return AyMidY[static_cast<std::size_t>(k) * g.nx + i];
    };

    SpinorField psi(g);
    auto store = [&](int i, int j, const Vec2& p) {
        psi.psi1.at(i, j) = p.p1;
        psi.psi2.at(i, j) = p.p2;
    };
    auto load = [&](int i, int j) -> Vec2 { return {psi.psi1.at(i, j), psi.psi2.at(i, j)}; };

    auto march_row = [&](int j) {
        Vec2 s = load(anchor_i, j);
        for (int k = anchor_i; k < g.nx - 1; ++k) {
            s = rk4_step(ax(k, j), axm(k, j), ax(k + 1, j), s, g.hx);
            guard_check(s, opt.norm_guard, k + 1, j);
            store(k + 1, j, s);
        }
        s = load(anchor_i, j);
        for (int k = anchor_i; k > 0; --k) {
            s = rk4_step(ax(k, j), axm(k - 1, j), ax(k - 1, j), s, -g.hx);
            guard_check(s, opt.norm_guard, k - 1, j);
            store(k - 1, j, s);
        }
    };
    auto march_col = [&](int i) {
        Vec2 s = load(i, anchor_j);
        for (int k = anchor_j; k < g.ny - 1; ++k) {
            s = rk4_step(ay(i, k), aym(i, k), ay(i, k + 1), s, g.hy);
            guard_check(s, opt.norm_guard, i, k + 1);
            store(i, k + 1, s);
        }
        s = load(i, anchor_j);
        for (int k = anchor_j; k > 0; --k) {
            s = rk4_step(ay(i, k), aym(i, k - 1), ay(i, k - 1), s, -g.hy);
            guard_check(s, opt.norm_guard, i, k - 1);
            store(i, k - 1, s);
        }
    };

    store(anchor_i, anchor_j, psi0);
    if (opt.row_first) {
        march_row(anchor_j);
        for (int i = 0; i < g.nx; ++i) march_col(i);
    } else {
        march_col(anchor_i);
        for (int j = 0; j < g.ny; ++j) march_row(j);
    }
    out.psi = std::move(psi);
    return out;
}

} // namespace nilcmc
