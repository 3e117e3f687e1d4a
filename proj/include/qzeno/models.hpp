#pragma once

// Hamiltonians, measured observables and dissipators for the three
// measurement scenarios. ħ = 1 throughout: Hamiltonians are angular rates.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qzeno/hilbert.hpp"

namespace qzeno {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J·s
inline constexpr double k_B = 1.380649e-23;      // J/K
inline constexpr double pi = 3.141592653589793238462643383279502884;
}  // namespace constants

enum class Scenario { RwaOscillators, TlsProbe, CpbReduced };
enum class Frame { Lab, Rwa };

const char* to_string(Scenario s);
const char* to_string(Frame f);
Scenario parse_scenario(const std::string& s);
Frame parse_frame(const std::string& s);

struct ModelSpec {
    Scenario scenario = Scenario::RwaOscillators;
    double lambda = 0.0;         // coupling rate
    double k = 1.0;              // measurement strength
    double omega_R = 0.0;        // resonator angular frequency [rad/s]
    double E_J_over_hbar = 0.0;  // CPB transition frequency [rad/s]
    std::optional<double> delta; // drive frequency; derived as E_J/ħ − ω_R when unset
    double Gamma = 0.0;          // resonator damping
    double T = 0.0;              // temperature [K]
    double gamma_CPB = 0.0;      // CPB damping and dephasing rate
    SpaceLayout dims{15, 15};
    Frame frame = Frame::Rwa;

    double resolved_delta() const { return delta ? *delta : E_J_over_hbar - omega_R; }
    bool operator==(const ModelSpec&) const = default;
};

/// Time dependence of one Hamiltonian term.
struct Modulation {
    enum class Kind { Constant, Cosine };
    Kind kind = Kind::Constant;
    double freq = 0.0;

    static Modulation constant() { return {}; }
    static Modulation cosine(double f) { return {Kind::Cosine, f}; }
    double at(double t) const;
};

struct HamiltonianTerm {
    Operator op;
    Modulation modulation;
};

/// Lindblad channel rate·𝒟[op], with 𝒟[c]ρ = 2cρc† − c†cρ − ρc†c.
struct Dissipator {
    Operator op;
    double rate = 0.0;
    std::string label;
};

struct ModelParts {
    std::vector<HamiltonianTerm> hamiltonian;
    Operator measured;
};

/// Everything the integrators need for one scenario.
struct ModelSystem {
    SpaceLayout layout;
    std::vector<HamiltonianTerm> hamiltonian;
    Operator measured;
    double k = 0.0;
    std::vector<Dissipator> dissipators;
    /// Observables the scenario can record, by name (N_R, N_P, sigma_x, ...).
    std::map<std::string, Operator> observables;
    /// Slots holding a truncated oscillator, monitored for top-level leakage.
    std::vector<std::size_t> oscillator_slots;
};

/// H(t) = Σ opᵢ·modᵢ(t)
Operator evaluate_hamiltonian(const std::vector<HamiltonianTerm>& terms, double t);

/// H = λ(a b† + b a†) in the interaction picture; measures b†b.
ModelParts build_rwa_oscillators(double lambda, const SpaceLayout& dims);

/// H = ω_R a†a + (ω_R/2)σ_z + λσ_x x_R on d_R ⊗ 2 (lab frame, no RWA); measures σ_z.
ModelParts build_tls_probe(double lambda, double omega_R, Index d_R);

/// Cooper-pair box probe measured in σ_x.
///   Lab: H(t) = ω_R a†a + λcos(δt)σ_z x_R + (E_J/2ħ)σ_x
///   Rwa: H = (λ/2)(a τ₊ + a† τ₋), τ± ladder operators of the σ_x eigenbasis.
ModelParts build_cpb_reduced(const ModelSpec& spec);

/// ξ = coth(ħω_R / 2k_B T); exactly 1 at T = 0.
double xi_factor(double T, double omega_R);

/// Γ(ξ+1)𝒟[a/2] + Γξ𝒟[a†/2] on the resonator slot.
std::vector<Dissipator> thermal_dissipators(double Gamma, double T, double omega_R,
                                            const SpaceLayout& layout);

/// CPB states and operators in the energy basis {|g⟩, |e⟩}, which is the
/// σ_x eigenbasis: |g⟩ is the −1 eigenvector of σ_x.
StateVector cpb_ground();
StateVector cpb_excited();
/// Charge-basis Pauli operators σ_x, σ_y, σ_z written in the energy basis.
Operator cpb_pauli(Axis axis);
/// τ₋ = |g⟩⟨e| and τ₊ = |e⟩⟨g| in the σ_x eigenbasis.
Operator cpb_lowering();
Operator cpb_raising();

/// Damping γ_CPB𝒟[τ₋/2] and dephasing γ_CPB𝒟[σ_x/2] on the probe slot.
std::vector<Dissipator> cpb_dissipators(double gamma_CPB, const SpaceLayout& layout);

/// Builds the full system for a spec, including dissipators and the named observables.
ModelSystem build_model(const ModelSpec& spec);

}  // namespace qzeno
