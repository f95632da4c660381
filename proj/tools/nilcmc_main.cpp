#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nilcmc/pipeline.hpp"

namespace {

void print_doc(const nilcmc::json& doc) {
    std::string text = doc.dump(2) + "\n";
    std::fwrite(text.data(), 1, text.size(), stdout);
}

} // namespace

int main(int argc, char** argv) {
    using namespace nilcmc;

    CLI::App app{"constant mean curvature surfaces in the Heisenberg group"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string format = "obj";
    std::vector<std::string> tol_overrides;

    auto add_common = [&](CLI::App* sub, bool need_config) {
        auto* c = sub->add_option("--config", config_path, "config JSON path");
        if (need_config) c->required();
        sub->add_option("--out", out_dir, "output directory, overrides outputs.dir");
        sub->add_option("--tol", tol_overrides, "tolerance override name=value, repeatable");
    };

    CLI::App* gen = app.add_subcommand(
        "generate", "integrate the constrained profile and store the potential");
    add_common(gen, true);
    CLI::App* build =
        app.add_subcommand("build", "full pipeline: potential, spinor, immersion, report");
    add_common(build, true);
    CLI::App* verify = app.add_subcommand(
        "verify", "recompute every residual from stored artifacts and gate them");
    add_common(verify, true);
    CLI::App* exp = app.add_subcommand("export", "re-export the stored immersion");
    add_common(exp, false);
    exp->add_option("--format", format, "obj or vtk")->check(CLI::IsMember({"obj", "vtk"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json err{{"error", std::string("argument error: ") + e.what()}, {"exit_code", 4}};
        print_doc(err);
        return 4;
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) {
            cfg = parse_config_file(config_path, tol_overrides, out_dir);
        } else if (exp->parsed() && !out_dir.empty()) {
            cfg.tol = default_tolerances();
            cfg.out_dir = out_dir;
        } else {
            throw ParseError("export needs --config or --out to locate the artifacts");
        }

        if (gen->parsed()) {
            print_doc(cmd_generate(cfg));
        } else if (build->parsed()) {
            print_doc(cmd_build(cfg));
        } else if (verify->parsed()) {
            json doc = cmd_verify(cfg);
            print_doc(doc);
            try {
                enforce_gates(doc);
            } catch (const Error& e) {
                return e.exit_code;
            }
        } else {
            print_doc(cmd_export(cfg, format));
        }
        return 0;
    } catch (const Error& e) {
        json err{{"error", e.what()}, {"exit_code", e.exit_code}};
        print_doc(err);
        return e.exit_code;
    } catch (const std::exception& e) {
        json err{{"error", e.what()}, {"exit_code", 1}};
        print_doc(err);
        return 1;
    }
}
