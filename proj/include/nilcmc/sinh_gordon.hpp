#pragma once

#include <string>

#include "nilcmc/report.hpp"
#include "nilcmc/stencils.hpp"

namespace nilcmc {

enum class Mode { Minimal, NonzeroH };

/// Mode/H bundle; c is always recomputed from H, never stored.
struct ConstraintSpec {
    Mode mode = Mode::Minimal;
    double H = 0.0;

    double c() const { return (4.0 * H * H - 1.0) / (4.0 * H * H + 1.0); }
    void validate() const {
        if (mode == Mode::NonzeroH && H == 0.0)
            throw ParseError("nonzeroH mode requires H != 0");
        if (mode == Mode::Minimal && H != 0.0)
            throw ParseError("minimal mode requires H = 0");
    }
};

/// v = rho + i*phi with e^v the Dirac potential. phi keeps the branch it was
/// generated with; verification never rewraps it.
struct PotentialLog {
    ComplexField v;
    double H = 0.0;
    Mode mode = Mode::Minimal;
    std::string branch_note;
};

struct ProfileOptions {
    double drho0 = 0.0;   // rho'(0)
    int sign = +1;        // branch sign of phi'(0) in nonzeroH mode
    bool project = false; // per-step projection of phi' back onto the constraint set
    double rho_guard = 20.0;
    double eps_sinh = 1e-8;
};

struct ProfileResult {
    PotentialLog pot;
    double drift = 0.0;            // max first-integral / constraint defect along the trajectory
    double min_abs_sinh_rho = 0.0; // over generated nodes
};

/// 1D reduction v = v(x) integrated by classical RK4 from the anchor column in both
/// directions, then extended constantly in y. Minimal mode pins phi = pi/2 and solves
/// rho'' = 8 sinh 2rho; nonzeroH solves the coupled system with phi'(0) chosen so the
/// first-order constraint holds exactly at the anchor. Throws InadmissibleError when
/// the phi'(0) radicand is negative, NormGuardError when |rho| passes the guard.
ProfileResult solve_constrained_profile(const ConstraintSpec& spec, double rho0, double phi0,
                                        const GridSpec& grid, int anchor_i,
                                        const ProfileOptions& opt = {});

/// R = laplacian(v) + 8 sinh 2v, componentwise complex sinh.
ComplexField sinh_gordon_residual_field(const ComplexField& v,
                                        LaplacianForm form = LaplacianForm::Composite);

/// v_zzbar + e^{2v} - |B|^2 e^{-2v}, with v_zzbar = laplacian(v)/4 on the composite stencil.
ComplexField compatibility_residual_field(const ComplexField& v, const ComplexField& B);

/// Minimal mode: Re(e^v). NonzeroH: phi_x^2/cosh^2 rho + phi_y^2/sinh^2 rho - 8(cos 2phi - c),
/// which requires min |sinh rho| > eps_sinh and throws InadmissibleError otherwise,
/// naming the offending nodes.
RealField constraint_residual_field(const PotentialLog& pot, const ConstraintSpec& spec,
                                    double eps_sinh = 1e-8);

/// (2H+i)/(2H-i); unit modulus for every real H, equal to -1 at H = 0.
cd ar_coefficient_constant(double H);

} // namespace nilcmc
