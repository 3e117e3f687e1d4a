// qzeno command-line driver.
//
//   qzeno run <config>
//   qzeno preset fig1|fig2a|fig2b|fig2c [--seed N] [--dt X] [--out DIR] [--ensemble M]
//   qzeno design <params-file> [--json]
//   qzeno validate
//
// Exit status: 0 success, 1 run finished but truncation leakage exceeded
// the limit, 2 any error.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "qzeno/design.hpp"
#include "qzeno/error.hpp"
#include "qzeno/scenarios.hpp"
#include "qzeno/validate.hpp"

namespace {

int finish(const qzeno::RunManifest& m, const qzeno::RunConfig& cfg) {
    std::printf("%s: wrote %s (status %s, max leakage %.3g)\n", cfg.name.c_str(), cfg.outputs.c_str(),
                m.json["status"].get<std::string>().c_str(), m.json["max_leakage"].get<double>());
    if (m.failed) {
        std::fprintf(stderr, "error: %s\n", m.json["failure"].get<std::string>().c_str());
        return 2;
    }
    if (m.leakage_exceeded) {
        std::fprintf(stderr, "warning: truncation leakage above %.0e; increase model.dims\n", qzeno::kLeakageLimit);
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum-trajectory simulator for continuous energy measurement of a nanoresonator"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run a configuration file");
    run->add_option("config", config_path, "Run configuration")->required()->check(CLI::ExistingFile);

    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<double> dt;
    std::optional<std::size_t> ensemble;
    std::optional<std::string> out_dir;
    bool make_dir = true;
    auto* preset = app.add_subcommand("preset", "Run a named preset");
    preset->add_option("name", preset_name, "fig1, fig2a, fig2b or fig2c")
        ->required()
        ->check(CLI::IsMember({"fig1", "fig2a", "fig2b", "fig2c"}));
    preset->add_option("--seed", seed, "Noise seed");
    preset->add_option("--dt", dt, "Time step")->check(CLI::PositiveNumber);
    preset->add_option("--out", out_dir, "Output directory (default $QZENO_OUT/<preset>)");
    preset->add_option("--ensemble", ensemble, "Number of trajectories")->check(CLI::PositiveNumber);

    std::string params_path;
    bool as_json = false;
    auto* design = app.add_subcommand("design", "Device-parameter calculator and validity report");
    design->add_option("params", params_path, "Device parameter file")->required()->check(CLI::ExistingFile);
    design->add_flag("--json", as_json, "Print the report as JSON");

    auto* validate = app.add_subcommand("validate", "Run the quick invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run) {
            const auto cfg = qzeno::load_run_config(config_path);
            return finish(qzeno::run_config(cfg), cfg);
        }
        if (*preset) {
            auto cfg = qzeno::preset_by_name(preset_name);
            if (seed) cfg.integrator.seed = *seed;
            if (dt) cfg.integrator.dt = *dt;
            if (ensemble) cfg.ensemble_size = *ensemble;
            if (out_dir) {
                cfg.outputs = *out_dir;
                make_dir = false;
            }
            if (make_dir) std::filesystem::create_directories(cfg.outputs);
            return finish(qzeno::run_config(cfg), cfg);
        }
        if (*design) {
            const auto kv = qzeno::KeyValueConfig::load(params_path);
            const auto report =
                qzeno::validity_report(qzeno::device_from_config(kv), qzeno::thresholds_from_config(kv));
            if (as_json) std::cout << qzeno::to_json(report).dump(2) << '\n';
            else std::cout << qzeno::format_table(report);
            return 0;
        }
        if (*validate) {
            bool all = true;
            for (const auto& c : qzeno::run_invariant_checks()) {
                std::printf("[%s] %s: %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
                all = all && c.pass;
            }
            return all ? 0 : 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
