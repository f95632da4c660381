#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilcmc/field_io.hpp"
#include "nilcmc/gw.hpp"
#include "nilcmc/immersion.hpp"
#include "nilcmc/mesh_io.hpp"
#include "nilcmc/reality.hpp"
#include "nilcmc/sinh_gordon.hpp"

namespace nilcmc {

using json = nlohmann::json;

struct PipelineConfig {
    Mode mode = Mode::Minimal;
    double H = 0.0;
    GridSpec grid;
    double rho0 = 0.0;
    double phi0 = 0.0; // minimal mode pins pi/2 regardless
    double drho0 = 0.0;
    int sign = +1;
    bool project = false;
    int anchor_i = 0, anchor_j = 0;
    NilPoint f0{};
    std::optional<Vec2> psi0;
    std::map<std::string, double> tol; // fully resolved, defaults + file + CLI overrides
    std::string out_dir = "out";

    double t(const std::string& name) const { return tol.at(name); }
};

/// Every tolerance the pipeline consults, with its default; unknown names are rejected.
const std::map<std::string, double>& default_tolerances();

/// Parses and fully resolves a config JSON document. `tol_overrides` entries look like
/// "name=value" (the --tol flag); `out_override` replaces outputs.dir when nonempty.
PipelineConfig parse_config(const json& doc, const std::vector<std::string>& tol_overrides = {},
                            const std::string& out_override = {});
PipelineConfig parse_config_file(const std::string& path,
                                 const std::vector<std::string>& tol_overrides = {},
                                 const std::string& out_override = {});

/// Canonical embedding of the resolved config; hashed into every report.
json resolved_config(const PipelineConfig& cfg);
std::string config_hash(const json& resolved);

/// Everything the build produces, before serialization.
struct PipelineRun {
    PotentialLog pot;
    double gen_drift = 0.0;
    double gen_min_sinh = 0.0;
    SpinorField psi;
    NilImmersion f;
    RealField h_est;
    RealField q_drift;            // |Q - 1|
    RealField constraint;
    json report;                  // residual + diagnostic sections, no command tag
    std::vector<std::string> warnings;
};

/// Full construction: profile -> spinor transport (both sweep orders) -> immersion ->
/// every residual suite. `v_override` replaces the generated potential (perturbation
/// studies); the spinor seed is then re-derived from the override.
PipelineRun run_pipeline(const PipelineConfig& cfg, const ComplexField* v_override = nullptr);

json cmd_generate(const PipelineConfig& cfg);
json cmd_build(const PipelineConfig& cfg);
/// Recomputes all residual suites from stored artifacts; report carries "ok" and
/// the list of violated gates.
json cmd_verify(const PipelineConfig& cfg);
json cmd_export(const PipelineConfig& cfg, const std::string& format);

/// Throws ToleranceError when a verify report carries violations.
void enforce_gates(const json& verify_report);

} // namespace nilcmc
