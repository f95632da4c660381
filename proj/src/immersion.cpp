#include "nilcmc/immersion.hpp"

#include <cmath>

#include "nilcmc/report.hpp"

namespace nilcmc {

namespace {

struct Coef {
    cd al{}, be{}, ga{};
};
inline Coef operator+(const Coef& x, const Coef& y) { return {x.al + y.al, x.be + y.be, x.ga + y.ga}; }
inline Coef operator*(double s, const Coef& x) { return {s * x.al, s * x.be, s * x.ga}; }

inline Vec3 vel(const Coef& c, const Vec3& f, bool xdir) {
    double a, b, g;
    if (xdir) {
        a = 2.0 * c.al.real();
        b = 2.0 * c.be.real();
        g = 2.0 * c.ga.real();
    } else {
        a = -2.0 * c.al.imag();
        b = -2.0 * c.be.imag();
        g = -2.0 * c.ga.imag();
    }
    return {a, b, b * f[0] + g};
}

inline Vec3 fma3(const Vec3& f, double h, const Vec3& k) {
    return {f[0] + h * k[0], f[1] + h * k[1], f[2] + h * k[2]};
}

Vec3 rk4_step(const Coef& c0, const Coef& cm, const Coef& c1, const Vec3& f, double h, bool xdir) {
    const Vec3 k1 = vel(c0, f, xdir);
    const Vec3 k2 = vel(cm, fma3(f, 0.5 * h, k1), xdir);
    const Vec3 k3 = vel(cm, fma3(f, 0.5 * h, k2), xdir);
    const Vec3 k4 = vel(c1, fma3(f, h, k3), xdir);
    Vec3 r;
    for (int t = 0; t < 3; ++t)
        r[t] = f[t] + h / 6.0 * (k1[t] + 2.0 * k2[t] + 2.0 * k3[t] + k4[t]);
    return r;
}

void guard_check(const Vec3& f, double guard, int i, int j) {
    const double n = std::fabs(f[0]) + std::fabs(f[1]) + std::fabs(f[2]);
    if (!(n <= guard))
        throw NormGuardError("immersion norm guard tripped at node " + std::to_string(i) + ","
                             + std::to_string(j) + ": |f| = " + fmt17(n));
}

} // namespace

NilImmersion integrate_immersion(const SpinorField& psi, const NilPoint& f0, int anchor_i,
                                 int anchor_j, bool row_first, double norm_guard) {
    const GridSpec& g = psi.grid();
    g.validate();
    if (g.nx < 4 || g.ny < 4)
        throw ParseError("immersion transport needs at least 4 nodes per axis");
    if (anchor_i < 0 || anchor_i >= g.nx || anchor_j < 0 || anchor_j >= g.ny)
        throw ParseError("anchor outside grid");

    FrameCoeffs fc = frame_coefficients(psi);
    std::vector<Coef> C(g.size());
    for (std::size_t k = 0; k < g.size(); ++k)
        C[k] = {fc.alpha.val[k], fc.beta.val[k], fc.gamma.val[k]};
    std::vector<Coef> CmX = seg_mid_x(C, g);
    std::vector<Coef> CmY = seg_mid_y(C, g);

    auto cat = [&](int i, int j) -> const Coef& { return C[g.idx(i, j)]; };
    auto cmx = [&](int k, int j) -> const Coef& {
        return CmX[static_cast<std::size_t>(j) * (g.nx - 1) + k];
    };
    auto cmy = [&](int i, int k) -> const Coef& {
        return CmY[static_cast<std::size_t>(k) * g.nx + i];
    };

    NilImmersion out(g);
    auto store = [&](int i, int j, const Vec3& f) { out.at(i, j) = {f[0], f[1], f[2]}; };
    auto load = [&](int i, int j) -> Vec3 {
        const NilPoint& p = out.at(i, j);
        return {p.x1, p.x2, p.x3};
    };

    auto march_row = [&](int j) {
        Vec3 s = load(anchor_i, j);
        for (int k = anchor_i; k < g.nx - 1; ++k) {
            s = rk4_step(cat(k, j), cmx(k, j), cat(k + 1, j), s, g.hx, true);
            guard_check(s, norm_guard, k + 1, j);
            store(k + 1, j, s);
        }
        s = load(anchor_i, j);
        for (int k = anchor_i; k > 0; --k) {
            s = rk4_step(cat(k, j), cmx(k - 1, j), cat(k - 1, j), s, -g.hx, true);
            guard_check(s, norm_guard, k - 1, j);
            store(k - 1, j, s);
        }
    };
    auto march_col = [&](int i) {
        Vec3 s = load(i, anchor_j);
        for (int k = anchor_j; k < g.ny - 1; ++k) {
            s = rk4_step(cat(i, k), cmy(i, k), cat(i, k + 1), s, g.hy, false);
            guard_check(s, norm_guard, i, k + 1);
            store(i, k + 1, s);
        }
        s = load(i, anchor_j);
        for (int k = anchor_j; k > 0; --k) {
            s = rk4_step(cat(i, k), cmy(i, k - 1), cat(i, k - 1), s, -g.hy, false);
            guard_check(s, norm_guard, i, k - 1);
            store(i, k - 1, s);
        }
    };

    store(anchor_i, anchor_j, {f0.x1, f0.x2, f0.x3});
    if (row_first) {
        march_row(anchor_j);
        for (int i = 0; i < g.nx; ++i) march_col(i);
    } else {
        march_col(anchor_i);
        for (int j = 0; j < g.ny; ++j) march_row(j);
    }
    return out;
}

namespace {

struct Jet {
    RealField c[3];
    explicit Jet(const GridSpec& g) : c{RealField(g), RealField(g), RealField(g)} {}
    Vec3 at(int i, int j) const { return {c[0].at(i, j), c[1].at(i, j), c[2].at(i, j)}; }
};

Jet component_fields(const NilImmersion& f) {
    Jet out(f.grid);
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) {
            const NilPoint& p = f.at(i, j);
            out.c[0].at(i, j) = p.x1;
            out.c[1].at(i, j) = p.x2;
            out.c[2].at(i, j) = p.x3;
        }
    return out;
}

Jet map_each(const Jet& in, RealField (*op)(const RealField&)) {
    Jet out(in.c[0].grid);
    for (int t = 0; t < 3; ++t) out.c[t] = op(in.c[t]);
    return out;
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 mat_apply(const Mat3& m, const Vec3& x) {
    Vec3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r[i] += m[i][j] * x[j];
    return r;
}

// covariant Hessian component: d2 + Gamma^k_ij da^i db^j
Vec3 cov_second(const std::array<Mat3, 3>& G, const Vec3& da, const Vec3& db, const Vec3& d2) {
    Vec3 r = d2;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r[k] += G[k][i][j] * da[i] * db[j];
    return r;
}

struct NormalData {
    bool ok = false;
    Vec3 n{};
    double gram = 0.0;
    double nlen = 0.0;
    double E = 0.0, F = 0.0, G2 = 0.0;
};

NormalData unit_normal_at(double x1, const Vec3& fu, const Vec3& fv) {
    NormalData nd;
    const Mat3 g = metric_at(x1);
    nd.E = metric_dot(g, fu, fu);
    nd.F = metric_dot(g, fu, fv);
    nd.G2 = metric_dot(g, fv, fv);
    nd.gram = nd.E * nd.G2 - nd.F * nd.F;
    const Vec3 nup = mat_apply(metric_inverse_at(x1), cross(fu, fv));
    const double nn2 = metric_dot(g, nup, nup);
    if (!(nn2 > 0.0) || !(nd.gram > 0.0)) return nd;
    nd.nlen = std::sqrt(nn2);
    for (int t = 0; t < 3; ++t) nd.n[t] = nup[t] / nd.nlen;
    nd.ok = true;
    return nd;
}

} // namespace

CurvatureResult mean_curvature_estimate(const NilImmersion& f, const SpinorField& psi,
                                        const CurvatureOptions& opt) {
    require_same_grid(f.grid, psi.grid(), "mean curvature");
    const GridSpec& g = f.grid;
    g.validate();

    const Jet F = component_fields(f);
    for (int t = 0; t < 3; ++t) require_finite(F.c[t], "immersion");
    const Jet Fu = map_each(F, [](const RealField& a) { return dx(a); });
    const Jet Fv = map_each(F, [](const RealField& a) { return dy(a); });
    const Jet Fuu = map_each(F, [](const RealField& a) { return d2x(a); });
    const Jet Fvv = map_each(F, [](const RealField& a) { return d2y(a); });
    const Jet Fuv = map_each(F, [](const RealField& a) { return dy(dx(a)); });

    const RealField conf = conformal_factor_field(psi);

    CurvatureResult res;
    res.H = RealField(g);
    res.flags.assign(g.size(), 0);
    bool first = true;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.idx(i, j);
            const double x1 = F.c[0].at(i, j);
            const Vec3 fu = Fu.at(i, j), fv = Fv.at(i, j);
            const NormalData nd = unit_normal_at(x1, fu, fv);
            if (conf.val[k] < opt.conf_floor || !nd.ok) {
                res.flags[k] = 1;
                ++res.flagged;
                continue;
            }
            const std::array<Mat3, 3> G = christoffel_at(x1);
            const Vec3 cuu = cov_second(G, fu, fu, Fuu.at(i, j));
            const Vec3 cuv = cov_second(G, fu, fv, Fuv.at(i, j));
            const Vec3 cvv = cov_second(G, fv, fv, Fvv.at(i, j));
            const Mat3 gm = metric_at(x1);
            const double e = metric_dot(gm, cuu, nd.n);
            const double f2 = metric_dot(gm, cuv, nd.n);
            const double g2 = metric_dot(gm, cvv, nd.n);
            res.H.val[k] = opt.sign * (e * nd.G2 - 2.0 * f2 * nd.F + g2 * nd.E) / (2.0 * nd.gram);
            if (first || nd.gram < res.min_gram) res.min_gram = nd.gram;
            if (first || nd.nlen < res.min_normal) res.min_normal = nd.nlen;
            first = false;
        }
    if (res.flagged == g.size())
        throw InadmissibleError("conformal factor degenerate on the whole grid");
    return res;
}

NilImmersion subsample2(const NilImmersion& f) {
    GridSpec s{(f.grid.nx + 1) / 2, (f.grid.ny + 1) / 2,
               2.0 * f.grid.hx, 2.0 * f.grid.hy, f.grid.x0, f.grid.y0};
    NilImmersion out(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) out.at(i, j) = f.at(2 * i, 2 * j);
    return out;
}

ComplexField subsample2(const ComplexField& f) {
    GridSpec s{(f.grid.nx + 1) / 2, (f.grid.ny + 1) / 2,
               2.0 * f.grid.hx, 2.0 * f.grid.hy, f.grid.x0, f.grid.y0};
    ComplexField out(s);
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) out.at(i, j) = f.at(2 * i, 2 * j);
    return out;
}

SpinorField subsample2(const SpinorField& psi) {
    SpinorField out;
    out.psi1 = subsample2(psi.psi1);
    out.psi2 = subsample2(psi.psi2);
    return out;
}

DiagnosticsResult normal_e3_diagnostics(const NilImmersion& f, const SpinorField& psi,
                                        const ComplexField& v, double H, double tol) {
    require_same_grid(f.grid, psi.grid(), "diagnostics");
    require_same_grid(f.grid, v.grid, "diagnostics");
    const GridSpec& g = f.grid;

    const Jet F = component_fields(f);
    const Jet Fu = map_each(F, [](const RealField& a) { return dx(a); });
    const Jet Fv = map_each(F, [](const RealField& a) { return dy(a); });

    DiagnosticsResult d;
    d.n_e3 = RealField(g);
    d.dz_n_e3_abs = RealField(g);
    d.psi_prod_abs = RealField(g);
    d.gap_plus = RealField(g);
    d.gap_minus = RealField(g);

    const cd ratio = cd{2.0 * H, -1.0} / cd{2.0 * H, 1.0};
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const std::size_t k = g.idx(i, j);
            const double x1 = F.c[0].at(i, j);
            const NormalData nd = unit_normal_at(x1, Fu.at(i, j), Fv.at(i, j));
            // pairing with E3 = (0,0,1): g E3 = (0, -x1, 1)
            d.n_e3.val[k] = nd.ok ? (-x1 * nd.n[1] + nd.n[2]) : 0.0;
            d.psi_prod_abs.val[k] = std::abs(psi.psi1.val[k] * std::conj(psi.psi2.val[k]));
            const cd w = std::conj(v.val[k]) - v.val[k];
            d.gap_plus.val[k] = std::abs(std::exp(w) - ratio);
            d.gap_minus.val[k] = std::abs(std::exp(-w) - ratio);
        }

    ComplexField ne3c(g);
    for (std::size_t k = 0; k < g.size(); ++k) ne3c.val[k] = cd{d.n_e3.val[k], 0.0};
    ComplexField dz_ne3 = wirtinger_dz(ne3c);
    for (std::size_t k = 0; k < g.size(); ++k) d.dz_n_e3_abs.val[k] = std::abs(dz_ne3.val[k]);

    bool first = true;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const std::size_t k = g.idx(i, j);
            if (first) {
                d.min_dz_n_e3 = d.dz_n_e3_abs.val[k];
                d.min_psi_prod = d.psi_prod_abs.val[k];
                d.min_gap_plus = d.gap_plus.val[k];
                d.min_gap_minus = d.gap_minus.val[k];
                d.max_abs_n_e3 = std::fabs(d.n_e3.val[k]);
                first = false;
            } else {
                d.min_dz_n_e3 = std::min(d.min_dz_n_e3, d.dz_n_e3_abs.val[k]);
                d.min_psi_prod = std::min(d.min_psi_prod, d.psi_prod_abs.val[k]);
                d.min_gap_plus = std::min(d.min_gap_plus, d.gap_plus.val[k]);
                d.min_gap_minus = std::min(d.min_gap_minus, d.gap_minus.val[k]);
                d.max_abs_n_e3 = std::max(d.max_abs_n_e3, std::fabs(d.n_e3.val[k]));
            }
            if (d.psi_prod_abs.val[k] < tol) ++d.flagged_psi_prod;
            if (d.gap_plus.val[k] < tol) ++d.flagged_gap_plus;
            if (d.gap_minus.val[k] < tol) ++d.flagged_gap_minus;
            if (d.dz_n_e3_abs.val[k] < tol) ++d.flagged_dz_n_e3;
        }
    return d;
}

} // namespace nilcmc
