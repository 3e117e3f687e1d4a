#pragma once

/**
 * @file
 * Conditioned dynamics under continuous measurement of a Hermitian X with
 * strength k:
 *
 *   SME  dρ = −i[H,ρ]dt − k[X,[X,ρ]]dt + √(2k)(Xρ + ρX − 2⟨X⟩ρ)dW + Σ rᵢ𝒟[cᵢ]ρ dt
 *   SSE  dψ = [−iH dt − k(X−⟨X⟩)²dt + √(2k)(X−⟨X⟩)dW]ψ
 *   dr   = ⟨X⟩dt + dW/√(8k)
 *
 * Both integrators advance the drift with either Euler or a Heun
 * predictor-corrector and add the diffusion at strong order 1/2 using one
 * N(0, dt) draw per step. States are renormalized after every step; the
 * pre-renormalization drift is reported as a diagnostic.
 */

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qzeno/hilbert.hpp"
#include "qzeno/kernels.hpp"
#include "qzeno/models.hpp"

namespace qzeno {

enum class Method { EulerMaruyama, HeunDriftEulerNoise };
enum class Unraveling { Sse, Sme };

const char* to_string(Method m);
const char* to_string(Unraveling u);
Method parse_method(const std::string& s);
Unraveling parse_unraveling(const std::string& s);

struct LambdaSegment {
    double t_start = 0.0;
    double lambda = 0.0;
    bool operator==(const LambdaSegment&) const = default;
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    std::uint64_t seed = 1;
    Method method = Method::HeunDriftEulerNoise;
    Unraveling unraveling = Unraveling::Sse;
    int snapshot_stride = 1;
    /// Piecewise-constant λ(t). Empty means the model's λ throughout.
    std::vector<LambdaSegment> lambda_schedule;
    /// Return the partial result instead of throwing on a numerical failure.
    bool keep_partial_on_failure = false;

    void validate() const;
    std::int64_t num_steps() const;
    /// λ in effect at time t (falls back to `base` when the schedule is empty).
    double lambda_at(double t, double base) const;
    bool operator==(const IntegratorConfig&) const = default;
};

using InitialState = std::variant<StateVector, DensityMatrix>;

/// Leakage warning threshold on the top Fock level population.
inline constexpr double kLeakageLimit = 1e-5;

struct TrajectoryResult {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> exp_series;
    std::map<std::string, std::vector<double>> var_series;
    /// Σ dr over each snapshot interval (first entry 0).
    std::vector<double> record;
    double max_leakage = 0.0;
    bool leakage_exceeded = false;
    /// SME: max |tr ρ' − tr ρ| before renormalization. SSE: max |‖ψ'‖ − 1|.
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    std::int64_t steps = 0;
    std::uint64_t seed = 0;
    std::uint64_t trajectory_index = 0;
    bool failed = false;
    std::string failure;
    InitialState final_state;
};

struct StepDiagnostics {
    double trace_drift = 0.0;  // SME trace drift or SSE norm drift
    double hermiticity_error = 0.0;
};

/// Stateful SME stepper; compiles the system once.
class SmeIntegrator {
public:
    SmeIntegrator(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured, double k,
                  const std::vector<Dissipator>& dissipators, Method method);

    /// Advances ρ in place by one step (t → t + dt) and renormalizes its trace.
    StepDiagnostics step(Matrix& rho, double t, double dt, double dW);
    /// Unrenormalized increment ρ' − ρ for one step.
    Matrix increment(const Matrix& rho, double t, double dt, double dW);
    double measured_expectation(const Matrix& rho) const { return sys_.measured().trace_product(rho); }
    const kernels::CompiledSystem& system() const noexcept { return sys_; }

private:
    kernels::CompiledSystem sys_;
    Method method_;
    kernels::Workspace ws_;
    Matrix a0_, a1_, b0_, pred_;
    Vector col_, noise_col_;
    std::vector<double> coef0_, coef1_;
};

/// Stateful SSE stepper (no dissipators).
class SseIntegrator {
public:
    SseIntegrator(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured, double k,
                  Method method);

    StepDiagnostics step(Vector& psi, double t, double dt, double dW);
    double measured_expectation(const Vector& psi) const { return sys_.measured().expect(psi); }

private:
    kernels::CompiledSystem sys_;
    Method method_;
    kernels::Workspace ws_;
    Vector a0_, a1_, b0_, pred_;
};

DensityMatrix sme_step(const DensityMatrix& rho, const std::vector<HamiltonianTerm>& hamiltonian, double t,
                       const Operator& measured, double k, const std::vector<Dissipator>& dissipators,
                       double dt, double dW, Method method = Method::HeunDriftEulerNoise,
                       StepDiagnostics* diag = nullptr);

StateVector sse_step(const StateVector& psi, const std::vector<HamiltonianTerm>& hamiltonian, double t,
                     const Operator& measured, double k, double dt, double dW,
                     Method method = Method::HeunDriftEulerNoise, StepDiagnostics* diag = nullptr);

/// dr = ⟨X⟩dt + dW/√(8k)
double record_increment(double x_expect, double k, double dt, double dW);

/// Builds the model for a given coupling; used to apply λ schedules.
using ModelFactory = std::function<ModelSystem(double lambda)>;

TrajectoryResult run_trajectory(const ModelSpec& model, const InitialState& init, const IntegratorConfig& cfg,
                                const std::vector<std::string>& observables,
                                std::uint64_t trajectory_index = 0);

/// Runs a prebuilt system; the λ schedule must be empty.
TrajectoryResult run_trajectory(const ModelSystem& system, const InitialState& init,
                                const IntegratorConfig& cfg, const std::vector<std::string>& observables,
                                std::uint64_t trajectory_index = 0);

TrajectoryResult run_trajectory(const ModelFactory& factory, double base_lambda, const InitialState& init,
                                const IntegratorConfig& cfg, const std::vector<std::string>& observables,
                                std::uint64_t trajectory_index = 0);

struct UnconditionalResult {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

/// Largest dimension accepted by the superoperator oracle.
inline constexpr Index kMaxUnconditionalDim = 64;

/// Ensemble-averaged (dW → 0) dynamics by RK4 on the vectorized Liouvillian.
UnconditionalResult unconditional_evolve(const DensityMatrix& rho0,
                                         const std::vector<HamiltonianTerm>& hamiltonian,
                                         const Operator& measured, double k,
                                         const std::vector<Dissipator>& dissipators, double dt,
                                         double t_final, int stride = 1);

}  // namespace qzeno
