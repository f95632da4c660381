#pragma once

#include <array>
#include <string>
#include <vector>

#include "nilcmc/nil.hpp"
#include "nilcmc/spinor.hpp"

namespace nilcmc {

struct NilImmersion {
    GridSpec grid;
    std::vector<NilPoint> pts;

    NilImmersion() = default;
    explicit NilImmersion(const GridSpec& g) : grid(g), pts(g.size()) {}

    NilPoint& at(int i, int j) { return pts[grid.idx(i, j)]; }
    const NilPoint& at(int i, int j) const { return pts[grid.idx(i, j)]; }
};

/// Integrates f_x = 2Re(alpha E1 + beta E2 + gamma E3), f_y = -2Im(...) at the moving
/// point, anchor row then columns (or the transpose order), classical RK4 with cubic
/// midpoint coefficients. f(anchor) = f0 exactly.
NilImmersion integrate_immersion(const SpinorField& psi, const NilPoint& f0, int anchor_i,
                                 int anchor_j, bool row_first = true, double norm_guard = 1e12);

struct CurvatureOptions {
    double conf_floor = 1e-8; // spinor conformal-factor gate
    double sign = +1.0;       // global orientation calibration
};

struct CurvatureResult {
    RealField H;
    std::vector<std::uint8_t> flags; // degenerate nodes, H left at 0
    std::size_t flagged = 0;
    double min_gram = 0.0;   // min of EG - F^2 over usable nodes
    double min_normal = 0.0; // min of the unnormalized normal's metric length
};

/// Trace of the shape operator / 2 from covariant second derivatives (analytic
/// Christoffel symbols) and the metric cross-product normal n = g^{-1}(f_x x f_y)/|.|.
/// Throws InadmissibleError when the conformal factor degenerates everywhere.
CurvatureResult mean_curvature_estimate(const NilImmersion& f, const SpinorField& psi,
                                        const CurvatureOptions& opt = {});

/// Every other node, doubled spacing, same origin; used for in-report convergence orders.
NilImmersion subsample2(const NilImmersion& f);
SpinorField subsample2(const SpinorField& psi);
ComplexField subsample2(const ComplexField& f);

struct DiagnosticsResult {
    RealField n_e3;         // metric pairing of the unit normal with E3
    RealField dz_n_e3_abs;  // |dz of the pairing|
    RealField psi_prod_abs; // |psi1 conj(psi2)|
    RealField gap_plus, gap_minus; // |e^{+(vbar-v)} - (2H-i)/(2H+i)| and the - branch
    double min_dz_n_e3 = 0.0, min_psi_prod = 0.0, min_gap_plus = 0.0, min_gap_minus = 0.0;
    double max_abs_n_e3 = 0.0;
    std::size_t flagged_psi_prod = 0, flagged_gap_plus = 0, flagged_gap_minus = 0,
                flagged_dz_n_e3 = 0;
};

/// Non-degeneracy diagnostics behind the reconstruction hypotheses: where the normal
/// lines up with E3, the spinor product vanishes and the two exponential gaps close.
/// Minima are over the interior; nodes below `tol` are counted per quantity.
DiagnosticsResult normal_e3_diagnostics(const NilImmersion& f, const SpinorField& psi,
                                        const ComplexField& v, double H, double tol = 1e-8);

} // namespace nilcmc
