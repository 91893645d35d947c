#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kolmo/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"kolmo: spectral toolkit for convex gradient systems and their "
                 "elliptic Kolmogorov equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = "out";
    std::string manifest_path;

    const auto add_run = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("-c,--config", config_path, "configuration file (key=value or JSON)")
            ->required();
        sub->add_option("-o,--out", outdir, "output directory (KOLMO_OUT_DIR overrides)");
        return sub;
    };

    add_run("sample", "draw a weighted ensemble from the Gibbs measure");
    add_run("simulate", "integrate the truncated gradient SDE");
    add_run("resolve", "Monte Carlo resolvent evaluation");
    add_run("solve", "weighted-grid elliptic solve with the bound ledger");
    add_run("invariant", "perturbed operator: invariant density and contraction sweep");
    add_run("verify", "run the full estimate suite; exit 0 only if every verdict passes");

    CLI::App* rep = app.add_subcommand("reproduce", "re-run a recorded manifest and compare bitwise");
    rep->add_option("manifest", manifest_path, "path to manifest.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        if (sub == "reproduce") return kolmo::reproduce(manifest_path);
        const kolmo::Config cfg = kolmo::Config::from_file(config_path);
        const kolmo::RunResult res = kolmo::run_subcommand(sub, cfg, outdir);
        std::cout << "manifest: " << res.manifest_path << "\n";
        return res.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
