#include <doctest.h>

#include <cmath>

#include "qzeno/dynamics.hpp"
#include "qzeno/noise.hpp"

using namespace qzeno;

namespace {

ModelSpec cpb(double gamma = 0.1) {
    ModelSpec m;
    m.scenario = Scenario::CpbReduced;
    m.lambda = 0.3;
    m.k = 1.0;
    m.omega_R = 1.0;
    m.Gamma = 0.05;
    m.T = 0.0;
    m.gamma_CPB = gamma;
    m.dims = SpaceLayout{8, 2};
    return m;
}

ModelSpec oscillators(Index d = 6) {
    ModelSpec m;
    m.lambda = 0.2;
    m.k = 1.0;
    m.dims = SpaceLayout{d, d};
    return m;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_CASE("integrator config") {
    IntegratorConfig c;
    c.dt = 0.01;
    c.t_final = 1.0;
    CHECK(c.num_steps() == 100);
    c.lambda_schedule = {{0.0, 0.5}, {0.4, 0.1}};
    CHECK_NOTHROW(c.validate());
    CHECK(c.lambda_at(0.39, 9.0) == 0.5);
    CHECK(c.lambda_at(0.4, 9.0) == 0.1);
    c.lambda_schedule = {};
    CHECK(c.lambda_at(0.4, 9.0) == 9.0);
    c.lambda_schedule = {{0.1, 0.5}};
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidSchedule);
    c.lambda_schedule = {{0.0, 0.5}, {0.0, 0.2}};
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidSchedule);
    c.lambda_schedule = {{0.0, -0.5}};
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::NegativeRate);
    c.lambda_schedule = {};
    c.dt = 0.0;
    CHECK(code_of([&] { c.validate(); }) == ErrorCode::InvalidConfig);
    CHECK(parse_method(to_string(Method::EulerMaruyama)) == Method::EulerMaruyama);
    CHECK(parse_unraveling("SME") == Unraveling::Sme);
    CHECK(code_of([] { parse_unraveling("jump"); }) == ErrorCode::ParseError);
}

TEST_CASE("measurement record increment") {
    CHECK(record_increment(0.7, 2.0, 1e-3, 0.0) == doctest::Approx(0.7e-3));
    CHECK(record_increment(0.0, 2.0, 1e-3, 0.04) == doctest::Approx(0.04 / 4.0));
    CHECK(code_of([] { record_increment(0.0, 0.0, 1e-3, 0.1); }) == ErrorCode::NonpositiveInput);
    // Var(dr) = dt/(8k)
    const NoiseStream n(5, 0);
    const double dt = 1e-2, k = 0.5;
    double s2 = 0.0;
    const int N = 50000;
    for (int i = 0; i < N; ++i) {
        const double r = record_increment(0.0, k, dt, n.increment(i, dt));
        s2 += r * r;
    }
    CHECK(s2 / N == doctest::Approx(dt / (8 * k)).epsilon(0.03));
}

TEST_CASE("sme step preserves the density-matrix invariants") {
    const ModelSystem sys = build_model(cpb());
    const DensityMatrix rho0(kron(coherent_state(8, {0.7, 0.0}), cpb_ground()));
    const NoiseStream noise(1, 0);
    for (Method m : {Method::EulerMaruyama, Method::HeunDriftEulerNoise}) {
        DensityMatrix rho = rho0;
        StepDiagnostics worst;
        for (int s = 0; s < 500; ++s) {
            StepDiagnostics d;
            rho = sme_step(rho, sys.hamiltonian, s * 1e-3, sys.measured, sys.k, sys.dissipators, 1e-3,
                           noise.increment(s, 1e-3), m, &d);
            worst.trace_drift = std::max(worst.trace_drift, d.trace_drift);
            worst.hermiticity_error = std::max(worst.hermiticity_error, d.hermiticity_error);
        }
        const auto chk = rho.check();
        CHECK(chk.ok);
        CHECK(chk.trace_error < 1e-13);
        CHECK(worst.trace_drift < 1e-10);
        CHECK(worst.hermiticity_error < 1e-12);
    }
}

TEST_CASE("fused sme step equals the generic increment") {
    for (const ModelSpec& spec : {cpb(), oscillators(5)}) {
        const ModelSystem sys = build_model(spec);
        const Index d = sys.layout.total_dim();
        for (Method m : {Method::EulerMaruyama, Method::HeunDriftEulerNoise}) {
            SmeIntegrator integ(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, m);
            CHECK(integ.system().column_local());
            Matrix rho = DensityMatrix(kron(coherent_state(spec.dims.factor(0), {0.5, 0.1}, 1e-3),
                                            fock_state(spec.dims.factor(1), 1)))
                             .matrix();
            rho = 0.8 * rho + 0.2 * Matrix::Identity(d, d) / double(d);
            const Matrix inc = integ.increment(rho, 0.2, 1e-3, 0.02);
            Matrix expect = rho + inc;
            expect /= expect.trace();
            Matrix stepped = rho;
            const auto diag = integ.step(stepped, 0.2, 1e-3, 0.02);
            CHECK((stepped - expect).cwiseAbs().maxCoeff() < 1e-14);
            CHECK(diag.trace_drift == doctest::Approx(std::abs(inc.trace())).epsilon(1e-6));
        }
    }
}

TEST_CASE("dW = 0 euler sme follows the master equation") {
    const ModelSystem sys = build_model(cpb(0.2));
    const DensityMatrix rho0(kron(fock_state(8, 2), cpb_excited()));
    const auto ref = unconditional_evolve(rho0, sys.hamiltonian, sys.measured, sys.k, sys.dissipators, 1e-3, 0.5,
                                          500);
    REQUIRE(ref.states.size() == 2);
    CHECK(ref.times.back() == doctest::Approx(0.5));
    SmeIntegrator integ(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, Method::HeunDriftEulerNoise);
    Matrix rho = rho0.matrix();
    for (int s = 0; s < 5000; ++s) integ.step(rho, s * 1e-4, 1e-4, 0.0);
    CHECK((rho - ref.states.back().matrix()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("unconditional limits") {
    const Operator x = number(kMaxUnconditionalDim + 1);
    CHECK(code_of([&] {
              unconditional_evolve(DensityMatrix(fock_state(x.dim(), 0)), {}, x, 1.0, {}, 0.1, 0.1);
          }) == ErrorCode::DimensionTooLarge);
    CHECK(code_of([] { unconditional_evolve(DensityMatrix(fock_state(3, 0)), {}, number(4), 1.0, {}, 0.1, 0.1); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("sse step keeps the norm") {
    const auto parts = build_rwa_oscillators(0.3, SpaceLayout{6, 6});
    StateVector psi = kron(coherent_state(6, {0.6, 0.0}, 1e-4), fock_state(6, 0));
    const NoiseStream noise(2, 0);
    double worst = 0.0;
    for (int s = 0; s < 400; ++s) {
        StepDiagnostics d;
        psi = sse_step(psi, parts.hamiltonian, s * 1e-3, parts.measured, 1.0, 1e-3, noise.increment(s, 1e-3),
                       Method::HeunDriftEulerNoise, &d);
        worst = std::max(worst, d.trace_drift);
    }
    CHECK(psi.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(worst < 1e-2);
    CHECK(code_of([&] { sse_step(psi, parts.hamiltonian, 0.0, number(3), 1.0, 1e-3, 0.0); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("trajectory runs") {
    const ModelSpec m = oscillators(8);
    const InitialState init = kron(coherent_state(8, {0.8, 0.0}), fock_state(8, 0));
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_final = 0.5;
    ic.seed = 4;
    ic.snapshot_stride = 50;
    const auto a = run_trajectory(m, init, ic, {"N_R", "N_P"});
    const auto b = run_trajectory(m, init, ic, {"N_R", "N_P"});
    CHECK(a.times.size() == 11);
    CHECK(a.times.back() == doctest::Approx(0.5));
    CHECK(a.exp_series.at("N_R") == b.exp_series.at("N_R"));
    CHECK(a.record == b.record);
    CHECK(a.record.front() == 0.0);
    CHECK(a.exp_series.at("N_R").front() == doctest::Approx(0.64).epsilon(1e-4));
    CHECK_FALSE(a.leakage_exceeded);
    const auto c = run_trajectory(m, init, ic, {"N_R"}, 1);
    CHECK(c.exp_series.at("N_R") != a.exp_series.at("N_R"));

    // A λ schedule follows the base run until the switch and departs from it afterwards.
    IntegratorConfig sched = ic;
    sched.lambda_schedule = {{0.0, 0.2}, {0.25, 0.0}};
    const auto s = run_trajectory(m, init, sched, {"N_R", "N_P"});
    const auto& base = a.exp_series.at("N_R");
    const auto& switched = s.exp_series.at("N_R");
    for (int i = 0; i <= 5; ++i) CHECK(switched[i] == base[i]);
    CHECK(switched.back() != base.back());

    ModelSpec diss = m;
    diss.Gamma = 0.1;
    CHECK(code_of([&] { run_trajectory(diss, init, ic, {"N_R"}); }) == ErrorCode::InvalidConfig);
    CHECK(code_of([&] { run_trajectory(m, init, ic, {"sigma_x"}); }) == ErrorCode::MissingObservable);
    CHECK(code_of([&] { run_trajectory(m, fock_state(4, 0), ic, {"N_R"}); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("leakage and failure handling") {
    const ModelSpec m = oscillators(3);
    IntegratorConfig ic;
    ic.dt = 1e-3;
    ic.t_final = 0.01;
    const auto r = run_trajectory(m, kron(fock_state(3, 2), fock_state(3, 0)), ic, {"N_R"});
    CHECK(r.leakage_exceeded);
    CHECK(r.max_leakage == doctest::Approx(1.0));

    ModelSpec strong = oscillators(6);
    strong.k = 1e6;
    IntegratorConfig big;
    big.dt = 1.0;
    big.t_final = 500.0;
    big.unraveling = Unraveling::Sme;
    const InitialState init = kron(coherent_state(6, {0.5, 0.0}, 1e-3), coherent_state(6, {0.5, 0.0}, 1e-3));
    CHECK(code_of([&] { run_trajectory(strong, init, big, {"N_R"}); }) == ErrorCode::NanDetected);
    big.keep_partial_on_failure = true;
    const auto partial = run_trajectory(strong, init, big, {"N_R"});
    CHECK(partial.failed);
    CHECK(partial.failure.find("seed") != std::string::npos);
    CHECK(partial.times.size() >= 1);
}
