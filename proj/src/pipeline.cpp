#include "nilcmc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "nilcmc/spinor.hpp"

namespace fs = std::filesystem;

namespace nilcmc {

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> defaults = {
        // verify gates (applied to residual maxima)
        {"dirac_max", 0.05},
        {"compat_max", 0.01},
        {"sinh_gordon_max", 0.04},
        {"constraint_max", 0.05},
        {"qdrift_max", 0.05},
        {"holo_max", 2.0},
        {"deriv_identity_max", 0.05},
        {"loop_psi_max", 0.05},
        {"loop_f_max", 0.2},
        {"conformality_max", 1e-12},
        {"hdev_max", 0.02},
        {"xires_max", 1.0},
        // numerical knobs
        {"eps_compat", 1e-6},
        {"eps_sinh", 1e-8},
        {"rho_guard", 20.0},
        {"norm_guard", 1e12},
        {"conf_floor", 1e-8},
        {"xi_tol_abs", 1e-8},
        {"xi_tol_den", 0.05},
        {"xi_tol_gap", 0.2},
        {"diag_floor", 1e-8},
    };
    return defaults;
}

namespace {

std::string mode_name(Mode m) { return m == Mode::Minimal ? "minimal" : "nonzeroH"; }

Mode mode_from_name(const std::string& s) {
    if (s == "minimal") return Mode::Minimal;
    if (s == "nonzeroH") return Mode::NonzeroH;
    throw ParseError("unknown mode \"" + s + "\" (expected \"minimal\" or \"nonzeroH\")");
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& known, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            throw ParseError("unknown key \"" + it.key() + "\" in " + where);
}

double need_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ParseError("missing \"" + key + "\" in " + where);
    if (!obj.at(key).is_number()) throw ParseError("\"" + key + "\" in " + where + " must be a number");
    return obj.at(key).get<double>();
}

double opt_number(const json& obj, const std::string& key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_number()) throw ParseError("\"" + key + "\" in " + where + " must be a number");
    return obj.at(key).get<double>();
}

json residual_json(const ResidualReport& r) {
    json j{{"max", r.max}, {"l2", r.l2}, {"flagged", r.flagged}};
    if (r.order) j["order"] = *r.order;
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw ParseError("write failed for " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return doc;
}

std::string join(const std::string& dir, const std::string& leaf) {
    return (fs::path(dir) / leaf).string();
}

// Residual key -> gate name. Keys absent here are report-only.
const std::vector<std::pair<std::string, std::string>>& gate_table() {
    static const std::vector<std::pair<std::string, std::string>> table = {
        {"dirac_r1", "dirac_max"},
        {"dirac_r2", "dirac_max"},
        {"sinh_gordon", "sinh_gordon_max"},
        {"compatibility", "compat_max"},
        {"constraint", "constraint_max"},
        {"conformality", "conformality_max"},
        {"q_normalization", "qdrift_max"},
        {"q_conservation", "qdrift_max"},
        {"ar_holomorphicity", "holo_max"},
        {"gw_derivative_identity_1", "deriv_identity_max"},
        {"gw_derivative_identity_2", "deriv_identity_max"},
        {"loop_psi", "loop_psi_max"},
        {"loop_f", "loop_f_max"},
        {"h_est_dev", "hdev_max"},
        {"xi_modulus", "xires_max"},
    };
    return table;
}

} // namespace

PipelineConfig parse_config(const json& doc, const std::vector<std::string>& tol_overrides,
                            const std::string& out_override) {
    if (!doc.is_object()) throw ParseError("config root must be a JSON object");
    reject_unknown_keys(doc, {"mode", "H", "grid", "profile", "anchor", "f0", "psi0", "tolerances", "outputs"},
                        "config");

    PipelineConfig cfg;
    if (!doc.contains("mode") || !doc.at("mode").is_string())
        throw ParseError("config needs a string \"mode\"");
    cfg.mode = mode_from_name(doc.at("mode").get<std::string>());

    cfg.H = opt_number(doc, "H", 0.0, "config");
    if (cfg.mode == Mode::NonzeroH && cfg.H == 0.0)
        throw ParseError("mode \"nonzeroH\" needs a nonzero \"H\"");
    if (cfg.mode == Mode::Minimal && cfg.H != 0.0)
        throw ParseError("mode \"minimal\" forces H = 0; remove the \"H\" entry");

    if (!doc.contains("grid") || !doc.at("grid").is_object())
        throw ParseError("config needs a \"grid\" object");
    const json& g = doc.at("grid");
    reject_unknown_keys(g, {"nx", "ny", "hx", "hy", "x0", "y0"}, "grid");
    cfg.grid.nx = static_cast<int>(need_number(g, "nx", "grid"));
    cfg.grid.ny = static_cast<int>(need_number(g, "ny", "grid"));
    cfg.grid.hx = need_number(g, "hx", "grid");
    cfg.grid.hy = need_number(g, "hy", "grid");
    cfg.grid.x0 = need_number(g, "x0", "grid");
    cfg.grid.y0 = need_number(g, "y0", "grid");
    cfg.grid.validate();

    if (!doc.contains("profile") || !doc.at("profile").is_object())
        throw ParseError("config needs a \"profile\" object");
    const json& p = doc.at("profile");
    reject_unknown_keys(p, {"rho0", "phi0", "drho0", "sign", "project"}, "profile");
    cfg.rho0 = need_number(p, "rho0", "profile");
    if (cfg.mode == Mode::NonzeroH) {
        cfg.phi0 = need_number(p, "phi0", "profile");
    } else {
        cfg.phi0 = opt_number(p, "phi0", std::numbers::pi / 2.0, "profile");
    }
    cfg.drho0 = opt_number(p, "drho0", 0.0, "profile");
    double sgn = opt_number(p, "sign", 1.0, "profile");
    if (sgn != 1.0 && sgn != -1.0) throw ParseError("profile \"sign\" must be +1 or -1");
    cfg.sign = static_cast<int>(sgn);
    if (p.contains("project")) {
        if (!p.at("project").is_boolean()) throw ParseError("profile \"project\" must be a boolean");
        cfg.project = p.at("project").get<bool>();
    }

    cfg.anchor_i = cfg.grid.nx / 2;
    cfg.anchor_j = cfg.grid.ny / 2;
    if (doc.contains("anchor")) {
        const json& a = doc.at("anchor");
        if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer() || !a[1].is_number_integer())
            throw ParseError("\"anchor\" must be [i, j] with integer entries");
        cfg.anchor_i = a[0].get<int>();
        cfg.anchor_j = a[1].get<int>();
    }
    if (cfg.anchor_i < 0 || cfg.anchor_i >= cfg.grid.nx || cfg.anchor_j < 0 || cfg.anchor_j >= cfg.grid.ny)
        throw ParseError("anchor lies outside the grid");

    if (doc.contains("f0")) {
        const json& f = doc.at("f0");
        if (!f.is_array() || f.size() != 3 || !f[0].is_number() || !f[1].is_number() || !f[2].is_number())
            throw ParseError("\"f0\" must be [x1, x2, x3]");
        cfg.f0 = NilPoint{f[0].get<double>(), f[1].get<double>(), f[2].get<double>()};
    }

    if (doc.contains("psi0")) {
        const json& s = doc.at("psi0");
        auto bad = [] { return ParseError("\"psi0\" must be [[re, im], [re, im]]"); };
        if (!s.is_array() || s.size() != 2) throw bad();
        cd comp[2];
        for (int k = 0; k < 2; ++k) {
            if (!s[k].is_array() || s[k].size() != 2 || !s[k][0].is_number() || !s[k][1].is_number())
                throw bad();
            comp[k] = cd{s[k][0].get<double>(), s[k][1].get<double>()};
        }
        cfg.psi0 = Vec2{comp[0], comp[1]};
    }

    cfg.tol = default_tolerances();
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        if (!t.is_object()) throw ParseError("\"tolerances\" must be an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!cfg.tol.count(it.key()))
                throw ParseError("unknown tolerance \"" + it.key() + "\"");
            if (!it.value().is_number())
                throw ParseError("tolerance \"" + it.key() + "\" must be a number");
            cfg.tol[it.key()] = it.value().get<double>();
        }
    }
    for (const std::string& ov : tol_overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw ParseError("--tol expects name=value, got \"" + ov + "\"");
        std::string name = ov.substr(0, eq);
        if (!cfg.tol.count(name)) throw ParseError("unknown tolerance \"" + name + "\"");
        try {
            size_t used = 0;
            std::string num = ov.substr(eq + 1);
            double val = std::stod(num, &used);
            if (used != num.size()) throw std::invalid_argument(num);
            cfg.tol[name] = val;
        } catch (const std::exception&) {
            throw ParseError("cannot parse tolerance value in \"" + ov + "\"");
        }
    }

    if (doc.contains("outputs")) {
        const json& o = doc.at("outputs");
        if (!o.is_object()) throw ParseError("\"outputs\" must be an object");
        reject_unknown_keys(o, {"dir"}, "outputs");
        if (o.contains("dir")) {
            if (!o.at("dir").is_string()) throw ParseError("outputs \"dir\" must be a string");
            cfg.out_dir = o.at("dir").get<std::string>();
        }
    }
    if (!out_override.empty()) cfg.out_dir = out_override;

    ConstraintSpec{cfg.mode, cfg.H}.validate();
    return cfg;
}

PipelineConfig parse_config_file(const std::string& path, const std::vector<std::string>& tol_overrides,
                                 const std::string& out_override) {
    return parse_config(read_json_file(path), tol_overrides, out_override);
}

json resolved_config(const PipelineConfig& cfg) {
    json j;
    j["mode"] = mode_name(cfg.mode);
    j["H"] = cfg.H;
    j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"hx", cfg.grid.hx},
                 {"hy", cfg.grid.hy}, {"x0", cfg.grid.x0}, {"y0", cfg.grid.y0}};
    j["profile"] = {{"rho0", cfg.rho0}, {"phi0", cfg.phi0}, {"drho0", cfg.drho0},
                    {"sign", cfg.sign}, {"project", cfg.project}};
    j["anchor"] = {cfg.anchor_i, cfg.anchor_j};
    j["f0"] = {cfg.f0.x1, cfg.f0.x2, cfg.f0.x3};
    if (cfg.psi0) {
        const Vec2& s = *cfg.psi0;
        j["psi0"] = {{s.p1.real(), s.p1.imag()}, {s.p2.real(), s.p2.imag()}};
    }
    json t;
    for (const auto& [name, val] : cfg.tol) t[name] = val;
    j["tolerances"] = t;
    j["outputs"] = {{"dir", cfg.out_dir}};
    return j;
}

std::string config_hash(const json& resolved) {
    std::string bytes = resolved.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

// Seed policy. Minimal surfaces take a fixed admissible seed; for H != 0 the seed is
// recovered from the reality coefficients at the anchor so Q starts at 1.
Vec2 derive_seed(const PipelineConfig& cfg, const ComplexField& v) {
    if (cfg.psi0) return *cfg.psi0;
    if (cfg.mode == Mode::Minimal) return Vec2{cd{1.0, 0.0}, cd{2.0, 0.0}};

    ComplexField bfield{v.grid, std::vector<cd>(v.grid.size(), ar_coefficient_constant(cfg.H))};
    XiOptions xopt{cfg.t("xi_tol_abs"), cfg.t("xi_tol_den"), cfg.t("xi_tol_gap")};
    XiResult xi = xi_recovery(v, bfield, cfg.H, xopt);
    size_t a = v.grid.idx(cfg.anchor_i, cfg.anchor_j);
    if (xi.flags[a])
        throw InadmissibleError("xi recovery is degenerate at the anchor node; "
                                "pick another anchor or supply psi0 explicitly");
    cd xi0 = xi.xi.val[a];
    double l0 = 2.0 * std::real(std::exp(v.val[a])) / (cfg.H * (1.0 + std::norm(xi0)));
    if (!(l0 > 0.0))
        throw InadmissibleError("seed amplitude is not positive at the anchor (l0 = " +
                                std::to_string(l0) + ")");
    double r = std::sqrt(l0);
    return Vec2{cd{r, 0.0}, r * xi0};
}

Vec2 normalize_seed(const Vec2& seed, const ComplexField& v, double H, int ai, int aj,
                    std::vector<std::string>& warnings) {
    auto [w1, w2] = reality_matrix_diag(v, H);
    size_t a = v.grid.idx(ai, aj);
    cd q0 = w1.val[a] * std::norm(seed.p1) + w2.val[a] * std::norm(seed.p2);
    if (!(q0.real() > 0.0)) {
        warnings.push_back("seed left unnormalized: Re Q(anchor) <= 0 for the supplied psi0");
        return seed;
    }
    cd s = std::sqrt(q0);
    return Vec2{seed.p1 / s, seed.p2 / s};
}

std::vector<uint8_t> flag_union(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    std::vector<uint8_t> u(a.size());
    for (size_t k = 0; k < a.size(); ++k) u[k] = a[k] || b[k];
    return u;
}

// Everything downstream of an existing (v, psi, f) triple: residual suites,
// curvature, diagnostics, loop closures. Shared verbatim by build and verify.
json residual_sections(const PipelineConfig& cfg, const PotentialLog& pot, const SpinorField& psi,
                       const Vec2& seed, const NilImmersion& f, PipelineRun* run,
                       std::vector<std::string>& warnings) {
    const ComplexField& v = pot.v;
    const GridSpec& grid = v.grid;
    const double H = pot.H;
    const ConstraintSpec spec{pot.mode, H};
    const cd B = ar_coefficient_constant(H);
    ComplexField bfield{grid, std::vector<cd>(grid.size(), B)};

    json res;

    // potential-level residuals
    res["sinh_gordon"] = residual_json(field_report("sinh_gordon", sinh_gordon_residual_field(v)));
    res["compatibility"] =
        residual_json(field_report("compatibility", compatibility_residual_field(v, bfield)));
    res["constraint"] = residual_json(
        field_report("constraint", constraint_residual_field(pot, spec, cfg.t("eps_sinh"))));

    // spinor-level residuals
    res["conformality"] =
        residual_json(field_report("conformality", conformality_residual_field(psi)));

    ComplexField u{grid, std::vector<cd>(grid.size())};
    for (size_t k = 0; k < u.val.size(); ++k) u.val[k] = std::exp(v.val[k]);
    auto [r1, r2] = dirac_residual_fields(psi, u);
    res["dirac_r1"] = residual_json(field_report("dirac_r1", r1));
    res["dirac_r2"] = residual_json(field_report("dirac_r2", r2));

    ComplexField q = reality_quadratic(psi, v, H);
    size_t a = grid.idx(cfg.anchor_i, cfg.anchor_j);
    RealField qnorm{grid, std::vector<double>(grid.size())};
    RealField qcons{grid, std::vector<double>(grid.size())};
    for (size_t k = 0; k < q.val.size(); ++k) {
        qnorm.val[k] = std::abs(q.val[k] - 1.0);
        qcons.val[k] = std::abs(q.val[k] - q.val[a]);
    }
    res["q_normalization"] = residual_json(field_report("q_normalization", qnorm));
    res["q_conservation"] = residual_json(field_report("q_conservation", qcons));

    ComplexField at = ar_differential(psi, H);
    res["ar_holomorphicity"] =
        residual_json(field_report("ar_holomorphicity", wirtinger_dzbar(at)));
    ComplexField bdev{grid, std::vector<cd>(grid.size())};
    const cd quarter = 0.25 * cd{2.0 * H, 1.0};
    for (size_t k = 0; k < at.val.size(); ++k) bdev.val[k] = quarter * at.val[k] - B;
    res["ar_b_agreement"] = residual_json(field_report("ar_b_agreement", bdev));

    auto [d1, d2] = derivative_identity_residuals(psi, v, H);
    res["gw_derivative_identity_1"] =
        residual_json(field_report("gw_derivative_identity_1", d1));
    res["gw_derivative_identity_2"] =
        residual_json(field_report("gw_derivative_identity_2", d2));

    // loop closures: redo both transports from the stored seed and compare sweep orders
    TransportOptions topt;
    topt.eps_compat = cfg.t("eps_compat");
    topt.norm_guard = cfg.t("norm_guard");
    topt.row_first = true;
    TransportResult ta = integrate_gw(v, bfield, seed, cfg.anchor_i, cfg.anchor_j, topt);
    topt.row_first = false;
    TransportResult tb = integrate_gw(v, bfield, seed, cfg.anchor_i, cfg.anchor_j, topt);
    for (const std::string& w : ta.warnings) warnings.push_back(w);
    RealField loop_psi{grid, std::vector<double>(grid.size())};
    for (size_t k = 0; k < loop_psi.val.size(); ++k)
        loop_psi.val[k] = std::abs(ta.psi.psi1.val[k] - tb.psi.psi1.val[k]) +
                          std::abs(ta.psi.psi2.val[k] - tb.psi.psi2.val[k]);
    res["loop_psi"] = residual_json(field_report("loop_psi", loop_psi));

    NilPoint fa = f.at(cfg.anchor_i, cfg.anchor_j);
    NilImmersion ga = integrate_immersion(psi, fa, cfg.anchor_i, cfg.anchor_j, true, cfg.t("norm_guard"));
    NilImmersion gb = integrate_immersion(psi, fa, cfg.anchor_i, cfg.anchor_j, false, cfg.t("norm_guard"));
    RealField loop_f{grid, std::vector<double>(grid.size())};
    for (size_t k = 0; k < loop_f.val.size(); ++k) {
        double dx1 = ga.pts[k].x1 - gb.pts[k].x1;
        double dx2 = ga.pts[k].x2 - gb.pts[k].x2;
        double dx3 = ga.pts[k].x3 - gb.pts[k].x3;
        loop_f.val[k] = std::sqrt(dx1 * dx1 + dx2 * dx2 + dx3 * dx3);
    }
    res["loop_f"] = residual_json(field_report("loop_f", loop_f));

    // curvature of the stored immersion, plus a stride-2 order estimate
    CurvatureOptions copt{cfg.t("conf_floor"), +1.0};
    CurvatureResult curv = mean_curvature_estimate(f, psi, copt);
    RealField hdev{grid, std::vector<double>(grid.size())};
    for (size_t k = 0; k < hdev.val.size(); ++k) hdev.val[k] = std::abs(curv.H.val[k] - H);
    ResidualReport hrep = field_report("h_est_dev", hdev, StatOptions{1, &curv.flags});
    if (grid.nx >= 9 && grid.ny >= 9) {
        NilImmersion f2 = subsample2(f);
        SpinorField psi2 = subsample2(psi);
        CurvatureResult curv2 = mean_curvature_estimate(f2, psi2, copt);
        RealField hdev2{f2.grid, std::vector<double>(f2.grid.size())};
        for (size_t k = 0; k < hdev2.val.size(); ++k) hdev2.val[k] = std::abs(curv2.H.val[k] - H);
        ResidualReport hrep2 = field_report("h_est_dev_2h", hdev2, StatOptions{1, &curv2.flags});
        hrep.order = estimate_order(hrep2.max, hrep.max);
    }
    res["h_est_dev"] = residual_json(hrep);

    // xi tracking (H != 0 only): |xi|^2 should match tau/sigma away from flagged nodes
    if (pot.mode == Mode::NonzeroH) {
        XiOptions xopt{cfg.t("xi_tol_abs"), cfg.t("xi_tol_den"), cfg.t("xi_tol_gap")};
        XiResult xi = xi_recovery(v, bfield, H, xopt);
        res["xi_modulus"] =
            residual_json(field_report("xi_modulus", xi.residual, StatOptions{1, &xi.flags}));
        AmplitudeResult amp = amplitude_recovery(v, xi.xi, H);
        std::vector<uint8_t> excl = flag_union(xi.flags, amp.flags);
        res["amplitude_im_defect"] = residual_json(
            field_report("amplitude_im_defect", amp.im_defect, StatOptions{1, &excl}));
    }

    // scale diagnostics
    DiagnosticsResult diag = normal_e3_diagnostics(f, psi, v, H, cfg.t("diag_floor"));
    RealField conf = conformal_factor_field(psi);
    double conf_min = conf.val.empty() ? 0.0 : conf.val[0];
    double psi_absmax = 0.0;
    for (size_t k = 0; k < conf.val.size(); ++k) {
        conf_min = std::min(conf_min, conf.val[k]);
        psi_absmax = std::max(psi_absmax,
                              std::max(std::abs(psi.psi1.val[k]), std::abs(psi.psi2.val[k])));
    }
    json dj;
    dj["max_abs_n_e3"] = diag.max_abs_n_e3;
    dj["min_dz_n_e3"] = diag.min_dz_n_e3;
    dj["min_psi_prod"] = diag.min_psi_prod;
    dj["min_gap_plus"] = diag.min_gap_plus;
    dj["min_gap_minus"] = diag.min_gap_minus;
    dj["flagged_dz_n_e3"] = diag.flagged_dz_n_e3;
    dj["flagged_psi_prod"] = diag.flagged_psi_prod;
    dj["flagged_gap_plus"] = diag.flagged_gap_plus;
    dj["flagged_gap_minus"] = diag.flagged_gap_minus;
    dj["conformal_factor_min"] = conf_min;
    dj["psi_absmax"] = psi_absmax;
    dj["curvature_min_gram"] = curv.min_gram;
    dj["curvature_min_normal"] = curv.min_normal;
    dj["curvature_flagged"] = curv.flagged;

    json out;
    out["residuals"] = res;
    out["diagnostics"] = dj;

    if (run) {
        run->h_est = curv.H;
        run->q_drift = qnorm;
        run->constraint = constraint_residual_field(pot, spec, cfg.t("eps_sinh"));
    }
    return out;
}

} // namespace

PipelineRun run_pipeline(const PipelineConfig& cfg, const ComplexField* v_override) {
    PipelineRun run;
    ConstraintSpec spec{cfg.mode, cfg.H};
    spec.validate();

    ProfileOptions popt;
    popt.drho0 = cfg.drho0;
    popt.sign = cfg.sign;
    popt.project = cfg.project;
    popt.rho_guard = cfg.t("rho_guard");
    popt.eps_sinh = cfg.t("eps_sinh");
    ProfileResult prof = solve_constrained_profile(spec, cfg.rho0, cfg.phi0, cfg.grid,
                                                   cfg.anchor_i, popt);
    run.pot = prof.pot;
    run.gen_drift = prof.drift;
    run.gen_min_sinh = prof.min_abs_sinh_rho;
    if (v_override) {
        require_same_grid(v_override->grid, cfg.grid, "potential override");
        require_finite(*v_override, "potential override");
        run.pot.v = *v_override;
        run.pot.branch_note += "; potential overridden after generation";
        run.warnings.push_back("potential field overridden; generator numbers describe the "
                               "unperturbed profile");
    }

    const ComplexField& v = run.pot.v;
    cd B = ar_coefficient_constant(cfg.H);
    ComplexField bfield{cfg.grid, std::vector<cd>(cfg.grid.size(), B)};

    Vec2 seed = derive_seed(cfg, v);
    seed = normalize_seed(seed, v, cfg.H, cfg.anchor_i, cfg.anchor_j, run.warnings);

    TransportOptions topt;
    topt.eps_compat = cfg.t("eps_compat");
    topt.norm_guard = cfg.t("norm_guard");
    TransportResult tr = integrate_gw(v, bfield, seed, cfg.anchor_i, cfg.anchor_j, topt);
    run.psi = tr.psi;
    for (const std::string& w : tr.warnings) run.warnings.push_back(w);

    run.f = integrate_immersion(run.psi, cfg.f0, cfg.anchor_i, cfg.anchor_j, true,
                                cfg.t("norm_guard"));

    std::vector<std::string> res_warnings;
    json sections = residual_sections(cfg, run.pot, run.psi, seed, run.f, &run, res_warnings);
    // transport warnings were already collected from the primary sweep
    run.report = sections;
    run.report["generator"] = {{"drift", run.gen_drift},
                               {"min_abs_sinh_rho", run.gen_min_sinh},
                               {"branch_note", run.pot.branch_note}};
    run.report["seed"] = {{"anchor", {cfg.anchor_i, cfg.anchor_j}},
                          {"psi0", {{seed.p1.real(), seed.p1.imag()}, {seed.p2.real(), seed.p2.imag()}}}};

    std::vector<std::string> dedup;
    for (const std::string& w : run.warnings)
        if (std::find(dedup.begin(), dedup.end(), w) == dedup.end()) dedup.push_back(w);
    run.warnings = dedup;
    run.report["warnings"] = run.warnings;
    return run;
}

json cmd_generate(const PipelineConfig& cfg) {
    ConstraintSpec spec{cfg.mode, cfg.H};
    spec.validate();
    ProfileOptions popt;
    popt.drho0 = cfg.drho0;
    popt.sign = cfg.sign;
    popt.project = cfg.project;
    popt.rho_guard = cfg.t("rho_guard");
    popt.eps_sinh = cfg.t("eps_sinh");
    ProfileResult prof = solve_constrained_profile(spec, cfg.rho0, cfg.phi0, cfg.grid,
                                                   cfg.anchor_i, popt);

    fs::create_directories(cfg.out_dir);
    write_cfld(join(cfg.out_dir, "potential.cfld"), prof.pot.v);
    json sidecar{{"H", prof.pot.H}, {"mode", mode_name(prof.pot.mode)},
                 {"branch_note", prof.pot.branch_note}};
    write_text_file(join(cfg.out_dir, "potential.json"), sidecar.dump(2) + "\n");

    json rc = resolved_config(cfg);
    json out;
    out["command"] = "generate";
    out["config"] = rc;
    out["config_hash"] = config_hash(rc);
    out["generator"] = {{"drift", prof.drift},
                        {"min_abs_sinh_rho", prof.min_abs_sinh_rho},
                        {"branch_note", prof.pot.branch_note}};
    json res;
    res["sinh_gordon"] =
        residual_json(field_report("sinh_gordon", sinh_gordon_residual_field(prof.pot.v)));
    res["constraint"] = residual_json(field_report(
        "constraint", constraint_residual_field(prof.pot, spec, cfg.t("eps_sinh"))));
    out["residuals"] = res;
    out["outputs"] = {{"potential", join(cfg.out_dir, "potential.cfld")},
                      {"potential_sidecar", join(cfg.out_dir, "potential.json")}};
    return out;
}

json cmd_build(const PipelineConfig& cfg) {
    PipelineRun run = run_pipeline(cfg);

    fs::create_directories(cfg.out_dir);
    write_cfld(join(cfg.out_dir, "potential.cfld"), run.pot.v);
    json pside{{"H", run.pot.H}, {"mode", mode_name(run.pot.mode)},
               {"branch_note", run.pot.branch_note}};
    write_text_file(join(cfg.out_dir, "potential.json"), pside.dump(2) + "\n");

    write_cfld(join(cfg.out_dir, "psi1.cfld"), run.psi.psi1);
    write_cfld(join(cfg.out_dir, "psi2.cfld"), run.psi.psi2);
    const json& seed = run.report.at("seed");
    json sside{{"H", run.pot.H}, {"anchor", seed.at("anchor")}, {"psi0", seed.at("psi0")}};
    write_text_file(join(cfg.out_dir, "spinor.json"), sside.dump(2) + "\n");

    std::vector<std::pair<std::string, const RealField*>> scalars = {
        {"H_est", &run.h_est}, {"Q_drift", &run.q_drift}, {"constraint_residual", &run.constraint}};
    export_vtk(join(cfg.out_dir, "immersion.vtk"), run.f, scalars);
    export_obj(join(cfg.out_dir, "surface.obj"), run.f);

    json rc = resolved_config(cfg);
    json out = run.report;
    out["command"] = "build";
    out["config"] = rc;
    out["config_hash"] = config_hash(rc);
    out["outputs"] = {{"potential", join(cfg.out_dir, "potential.cfld")},
                      {"potential_sidecar", join(cfg.out_dir, "potential.json")},
                      {"psi1", join(cfg.out_dir, "psi1.cfld")},
                      {"psi2", join(cfg.out_dir, "psi2.cfld")},
                      {"spinor_sidecar", join(cfg.out_dir, "spinor.json")},
                      {"immersion", join(cfg.out_dir, "immersion.vtk")},
                      {"surface", join(cfg.out_dir, "surface.obj")},
                      {"report", join(cfg.out_dir, "report.json")}};
    write_text_file(join(cfg.out_dir, "report.json"), out.dump(2) + "\n");
    return out;
}

json cmd_verify(const PipelineConfig& cfg) {
    // stored artifacts are the source of truth; the config supplies tolerances
    ComplexField v = read_cfld(join(cfg.out_dir, "potential.cfld"));
    json pside = read_json_file(join(cfg.out_dir, "potential.json"));
    if (!pside.contains("H") || !pside.contains("mode") || !pside.contains("branch_note"))
        throw ParseError("potential.json needs H, mode and branch_note");
    PotentialLog pot;
    pot.v = v;
    pot.H = pside.at("H").get<double>();
    pot.mode = mode_from_name(pside.at("mode").get<std::string>());
    pot.branch_note = pside.at("branch_note").get<std::string>();
    ConstraintSpec{pot.mode, pot.H}.validate();

    SpinorField psi{read_cfld(join(cfg.out_dir, "psi1.cfld")),
                    read_cfld(join(cfg.out_dir, "psi2.cfld"))};
    psi.validate();
    require_same_grid(psi.grid(), v.grid, "stored spinor vs potential");

    json sside = read_json_file(join(cfg.out_dir, "spinor.json"));
    if (!sside.contains("H") || !sside.contains("anchor") || !sside.contains("psi0"))
        throw ParseError("spinor.json needs H, anchor and psi0");
    if (sside.at("H").get<double>() != pot.H)
        throw ParseError("spinor.json H disagrees with potential.json");
    const json& aj = sside.at("anchor");
    if (!aj.is_array() || aj.size() != 2) throw ParseError("spinor.json anchor must be [i, j]");
    PipelineConfig vcfg = cfg;
    vcfg.mode = pot.mode;
    vcfg.H = pot.H;
    vcfg.grid = v.grid;
    vcfg.anchor_i = aj[0].get<int>();
    vcfg.anchor_j = aj[1].get<int>();
    if (vcfg.anchor_i < 0 || vcfg.anchor_i >= v.grid.nx || vcfg.anchor_j < 0 ||
        vcfg.anchor_j >= v.grid.ny)
        throw ParseError("spinor.json anchor lies outside the stored grid");
    const json& s0 = sside.at("psi0");
    if (!s0.is_array() || s0.size() != 2 || !s0[0].is_array() || !s0[1].is_array() ||
        s0[0].size() != 2 || s0[1].size() != 2)
        throw ParseError("spinor.json psi0 must be [[re, im], [re, im]]");
    Vec2 seed{cd{s0[0][0].get<double>(), s0[0][1].get<double>()},
              cd{s0[1][0].get<double>(), s0[1][1].get<double>()}};

    VtkData mesh = read_vtk(join(cfg.out_dir, "immersion.vtk"));
    require_same_grid(mesh.f.grid, v.grid, "stored immersion vs potential");

    std::vector<std::string> warnings;
    json sections = residual_sections(vcfg, pot, psi, seed, mesh.f, nullptr, warnings);

    json rc = resolved_config(cfg);
    json out = sections;
    out["command"] = "verify";
    out["config"] = rc;
    out["config_hash"] = config_hash(rc);
    out["generator"] = {{"branch_note", pot.branch_note}};
    out["seed"] = {{"anchor", {vcfg.anchor_i, vcfg.anchor_j}},
                   {"psi0", {{seed.p1.real(), seed.p1.imag()}, {seed.p2.real(), seed.p2.imag()}}}};
    std::vector<std::string> dedup;
    for (const std::string& w : warnings)
        if (std::find(dedup.begin(), dedup.end(), w) == dedup.end()) dedup.push_back(w);
    out["warnings"] = dedup;

    json violations = json::array();
    for (const auto& [key, gate] : gate_table()) {
        if (!out.at("residuals").contains(key)) continue;
        double max = out.at("residuals").at(key).at("max").get<double>();
        double lim = vcfg.t(gate);
        if (!(max <= lim)) {
            violations.push_back({{"residual", key}, {"max", max}, {"tolerance", gate},
                                  {"limit", lim}});
        }
    }
    out["violations"] = violations;
    out["ok"] = violations.empty();
    return out;
}

void enforce_gates(const json& verify_report) {
    const json& v = verify_report.at("violations");
    if (v.empty()) return;
    std::ostringstream msg;
    msg << v.size() << " residual gate(s) exceeded:";
    for (const json& item : v)
        msg << " " << item.at("residual").get<std::string>() << " max "
            << item.at("max").get<double>() << " > " << item.at("limit").get<double>() << ";";
    throw ToleranceError(msg.str());
}

json cmd_export(const PipelineConfig& cfg, const std::string& format) {
    VtkData mesh = read_vtk(join(cfg.out_dir, "immersion.vtk"));
    std::string path;
    if (format == "obj") {
        path = join(cfg.out_dir, "surface.obj");
        export_obj(path, mesh.f);
    } else if (format == "vtk") {
        path = join(cfg.out_dir, "surface.vtk");
        std::vector<std::pair<std::string, const RealField*>> scalars;
        scalars.reserve(mesh.scalars.size());
        for (const auto& [name, fld] : mesh.scalars) scalars.push_back({name, &fld});
        export_vtk(path, mesh.f, scalars);
    } else {
        throw ParseError("unknown export format \"" + format + "\" (expected obj or vtk)");
    }
    json out;
    out["command"] = "export";
    out["format"] = format;
    out["written"] = path;
    out["vertices"] = static_cast<size_t>(mesh.f.grid.nx) * mesh.f.grid.ny;
    out["faces"] = static_cast<size_t>(mesh.f.grid.nx - 1) * (mesh.f.grid.ny - 1);
    return out;
}

} // namespace nilcmc
