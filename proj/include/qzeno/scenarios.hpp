#pragma once

// Experiment runner: run configurations, named presets and the output
// files (timeseries.csv, histogram.json, jumps.json, manifest.json).

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qzeno/config.hpp"
#include "qzeno/dynamics.hpp"
#include "qzeno/models.hpp"
#include "qzeno/observables.hpp"

namespace qzeno {

inline constexpr int kConfigFormatVersion = 1;
inline constexpr const char* kCodeVersion = "qzeno 1.0.0";

/// Initial state of one subsystem.
struct SubsystemInit {
    enum class Kind { Coherent, Fock, Ground, Excited };
    Kind kind = Kind::Ground;
    cplx alpha{0.0, 0.0};
    Index n = 0;

    static SubsystemInit coherent(cplx a) { return {Kind::Coherent, a, 0}; }
    static SubsystemInit fock(Index level) { return {Kind::Fock, {}, level}; }
    static SubsystemInit ground() { return {Kind::Ground, {}, 0}; }

    std::string to_string() const;
    static SubsystemInit parse(const std::string& s);
    bool operator==(const SubsystemInit&) const = default;
};

struct AnalysisConfig {
    std::string histogram_observable = "N_R";
    double bin_width = kDefaultBinWidth;
    double peak_band = kDefaultPeakBand;
    double hysteresis = kDefaultHysteresis;
    int min_dwell_steps = 20;
    bool operator==(const AnalysisConfig&) const = default;
};

struct RunConfig {
    std::string name = "custom";
    ModelSpec model;
    IntegratorConfig integrator;
    SubsystemInit init_resonator = SubsystemInit::coherent({std::sqrt(2.0), 0.0});
    SubsystemInit init_probe = SubsystemInit::ground();
    /// Output columns: recorded observables and "Var(<name>)" entries.
    std::vector<std::string> observables;
    std::filesystem::path outputs = "qzeno_out";
    std::size_t ensemble_size = 1;
    int workers = 0;
    AnalysisConfig analysis;

    /// Base observables to record (Var(...) columns resolved to their operator).
    std::vector<std::string> recorded_observables() const;
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

KeyValueConfig to_key_values(const RunConfig& cfg);
RunConfig run_config_from(const KeyValueConfig& kv);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

InitialState build_initial_state(const RunConfig& cfg);

/// Output directory: $QZENO_OUT when set, otherwise ./qzeno_out.
std::filesystem::path default_output_dir();

RunConfig preset_fig1();
/// case ∈ {'a','b','c'}
RunConfig preset_fig2(char which);
/// Presets by CLI name: fig1, fig2a, fig2b, fig2c.
RunConfig preset_by_name(const std::string& name);

struct RunManifest {
    nlohmann::json json;
    bool leakage_exceeded = false;
    bool failed = false;
    std::map<std::string, std::string> checksums;  // file name → sha256 hex
};

/// Executes the run and writes its files into cfg.outputs (which must exist).
RunManifest run_config(const RunConfig& cfg);

std::string sha256_hex(const std::filesystem::path& file);

}  // namespace qzeno
