#pragma once

// Circuit-QED device calculator: measurement strength after eliminating
// the transmission-line resonator, resonator damping, and a report on the
// separation-of-scales inequalities. All frequencies are angular [rad/s].

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qzeno/config.hpp"

namespace qzeno {

struct DeviceParams {
    double g = 0.0;             // CPB–SR coupling
    double Delta = 0.0;         // CPB–SR detuning
    double gamma = 0.0;         // SR decay rate
    double n_photons = 0.0;     // mean SR photon number |α|²
    double omega_S = 0.0;       // SR frequency
    double omega_R = 0.0;       // nanoresonator frequency
    double E_J_over_hbar = 0.0; // Josephson frequency
    double Q = 0.0;             // resonator quality factor
    double T = 0.0;             // temperature [K]
    double lambda = 0.0;        // resonator–CPB coupling
    /// Published values to check against (k, omega_S/Delta, gamma*Delta/g^2, ...).
    std::map<std::string, double> quoted;
};

struct DesignThresholds {
    /// Minimum value for every "much greater than" ratio.
    double much_greater = 10.0;
    /// Relative tolerance used when comparing a quoted value with its recomputation.
    double quote_tolerance = 0.05;
};

struct RatioCheck {
    std::string name;
    double value = 0.0;
    std::string relation;  // ">>" or "<<"
    bool pass = false;
};

struct QuoteCheck {
    std::string name;
    double quoted = 0.0;
    double recomputed = 0.0;
    bool agrees = false;
    std::string note;
};

struct ValidityReport {
    double k = 0.0;
    double Gamma = 0.0;
    std::vector<RatioCheck> ratios;
    std::vector<QuoteCheck> quotes;

    const RatioCheck& ratio(const std::string& name) const;
    const QuoteCheck& quote(const std::string& name) const;
    bool all_pass() const;
};

/// k = g⁴|α|²/(Δ²γ)
double measurement_strength(double g, double Delta, double gamma, double n_photons);
/// Γ = ω_R/Q
double resonator_damping(double omega_R, double Q);

ValidityReport validity_report(const DeviceParams& params, const DesignThresholds& thresholds = {});

/// Circuit-QED reference device: g = Δ/40, Δ = 4π×10⁸, γ = π×10⁷, |α|² = 2×10³,
/// ω_S/2π = 10 GHz, ω_R/2π = 100 MHz, Q = 10⁵, λ = 3×10⁷, together with its quoted design values.
DeviceParams reference_device();

/// Reads design.* keys. Frequencies given as `<name>_hz` are converted with 2π.
DeviceParams device_from_config(const KeyValueConfig& cfg);
DesignThresholds thresholds_from_config(const KeyValueConfig& cfg);

nlohmann::json to_json(const ValidityReport& r);
std::string format_table(const ValidityReport& r);

}  // namespace qzeno
