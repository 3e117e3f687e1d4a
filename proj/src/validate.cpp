#include "qzeno/validate.hpp"

#include <cstdio>
#include <functional>

#include "qzeno/ensemble.hpp"
#include "qzeno/noise.hpp"

namespace qzeno {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

CheckResult ladder_commutator() {
    const Index d = 12;
    const Matrix c = commutator(destroy(d), create(d)).matrix();
    double err = 0.0;
    for (Index i = 0; i + 1 < d; ++i) {
        for (Index j = 0; j + 1 < d; ++j) err = std::max(err, std::abs(c(i, j) - (i == j ? 1.0 : 0.0)));
    }
    return {"ladder commutator", err < 1e-12, fmt("max |[a,a+] - 1| below top level = %.2e", err)};
}

CheckResult philox_known_answer() {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    const bool ok = out[0] == 0x6627e8d5u && out[1] == 0xe169c58du && out[2] == 0xbc57ac4cu && out[3] == 0x9b00dbd8u;
    return {"philox known answer", ok, ok ? "zero block matches" : "zero block mismatch"};
}

CheckResult sme_step_invariants() {
    ModelSpec m;
    m.scenario = Scenario::CpbReduced;
    m.lambda = 0.3;
    m.k = 1.0;
    m.omega_R = 1.0;
    m.E_J_over_hbar = 1.0;
    m.Gamma = 0.05;
    m.T = 0.0;
    m.gamma_CPB = 0.1;
    m.dims = SpaceLayout{10, 2};
    const ModelSystem sys = build_model(m);
    SmeIntegrator integ(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, Method::HeunDriftEulerNoise);
    Matrix rho = DensityMatrix(kron(coherent_state(10, {0.8, 0.0}), cpb_ground())).matrix();
    const NoiseStream noise(3, 0);
    double drift = 0.0;
    double herm = 0.0;
    for (int s = 0; s < 2000; ++s) {
        const auto d = integ.step(rho, s * 1e-3, 1e-3, noise.increment(s, 1e-3));
        drift = std::max(drift, d.trace_drift);
        herm = std::max(herm, d.hermiticity_error);
    }
    const auto chk = DensityMatrix(rho).check();
    return {"SME step invariants", chk.ok && drift < 1e-6,
            fmt("max trace drift %.2e, final min eigenvalue %.2e", drift, chk.min_eigenvalue)};
}

CheckResult unconditional_match() {
    // With dW = 0 the Euler SME reduces to the master equation.
    ModelSpec m;
    m.scenario = Scenario::RwaOscillators;
    m.lambda = 0.4;
    m.k = 0.5;
    m.dims = SpaceLayout{4, 4};
    m.Gamma = 0.1;
    const ModelSystem sys = build_model(m);
    const DensityMatrix rho0(kron(fock_state(4, 1), fock_state(4, 0)));
    const double dt = 1e-4;
    const double t_final = 1.0;
    const auto ref = unconditional_evolve(rho0, sys.hamiltonian, sys.measured, sys.k, sys.dissipators, 1e-3,
                                          t_final, 1000);
    SmeIntegrator integ(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, Method::EulerMaruyama);
    Matrix rho = rho0.matrix();
    const auto steps = static_cast<int>(std::llround(t_final / dt));
    for (int s = 0; s < steps; ++s) integ.step(rho, s * dt, dt, 0.0);
    const double err = (rho - ref.states.back().matrix()).cwiseAbs().maxCoeff();
    return {"dW = 0 matches master equation", err < 1e-3, fmt("max |rho_sme - rho_me| = %.2e", err)};
}

CheckResult excitation_conservation() {
    ModelSpec m;
    m.scenario = Scenario::RwaOscillators;
    m.lambda = 0.5;
    m.k = 1.0;
    m.dims = SpaceLayout{8, 8};
    // A number eigenstate stays in its excitation sector on every trajectory.
    const InitialState init = kron(fock_state(8, 2), fock_state(8, 1));
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_final = 5.0;
    ic.seed = 11;
    ic.snapshot_stride = 100;
    const auto r = run_trajectory(m, init, ic, {"N_tot"});
    const auto& n = r.exp_series.at("N_tot");
    double dev = 0.0;
    for (double v : n) dev = std::max(dev, std::abs(v - n.front()));
    return {"N_R + N_P conserved from a Fock state", dev < 1e-4, fmt("max |dN_tot| = %.2e", dev)};
}

CheckResult ensemble_worker_independence() {
    ModelSpec m;
    m.scenario = Scenario::RwaOscillators;
    m.lambda = 0.3;
    m.k = 1.0;
    m.dims = SpaceLayout{8, 8};
    const InitialState init = kron(coherent_state(8, {0.5, 0.0}), fock_state(8, 0));
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_final = 0.5;
    ic.snapshot_stride = 50;
    const auto a = run_ensemble(m, init, ic, {"N_R"}, {6, 1, false});
    const auto b = run_ensemble(m, init, ic, {"N_R"}, {6, 3, false});
    const bool same = a.mean.at("N_R") == b.mean.at("N_R") && a.stddev.at("N_R") == b.stddev.at("N_R");
    return {"ensemble independent of worker count", same, same ? "bit-identical" : "results differ"};
}

}  // namespace

std::vector<CheckResult> run_invariant_checks() {
    const std::vector<std::function<CheckResult()>> checks = {ladder_commutator, philox_known_answer,
                                                              sme_step_invariants, unconditional_match,
                                                              excitation_conservation,
                                                              ensemble_worker_independence};
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        try {
            out.push_back(c());
        } catch (const std::exception& e) {
            out.push_back({"(exception)", false, e.what()});
        }
    }
    return out;
}

}  // namespace qzeno
