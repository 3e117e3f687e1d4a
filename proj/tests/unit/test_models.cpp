#include <doctest.h>

#include "qzeno/models.hpp"

using namespace qzeno;

namespace {

double norm_of(const Operator& a) { return a.matrix().norm(); }

ModelSpec cpb_spec(Frame frame) {
    ModelSpec m;
    m.scenario = Scenario::CpbReduced;
    m.frame = frame;
    m.lambda = 0.2;
    m.k = 1.0;
    m.omega_R = 3.0;
    m.E_J_over_hbar = 6.0;
    m.dims = SpaceLayout{6, 2};
    return m;
}

}  // namespace

TEST_CASE("rwa oscillators") {
    const SpaceLayout L{5, 5};
    const auto parts = build_rwa_oscillators(0.3, L);
    REQUIRE(parts.hamiltonian.size() == 1);
    const Operator& h = parts.hamiltonian[0].op;
    CHECK(h.is_hermitian());
    // |1,0⟩ → λ|0,1⟩
    const Index i10 = 1 * 5 + 0, i01 = 0 * 5 + 1;
    CHECK(std::abs(h(i01, i10) - 0.3) < 1e-15);
    const Operator n_tot = embed(number(5), L, 0) + embed(number(5), L, 1);
    CHECK(norm_of(commutator(h, n_tot)) < 1e-12);
    CHECK(parts.measured.matrix().isApprox(embed(number(5), L, 1).matrix()));
    CHECK(norm_of(build_rwa_oscillators(0.0, L).hamiltonian[0].op) == 0.0);
}

TEST_CASE("tls probe") {
    const auto parts = build_tls_probe(0.1, 2.0, 4);
    const Operator h = evaluate_hamiltonian(parts.hamiltonian, 0.0);
    CHECK(h.is_hermitian());
    const SpaceLayout L{4, 2};
    const Operator sz = embed(pauli(Axis::Z), L, 1);
    CHECK(parts.measured.matrix().isApprox(sz.matrix()));
    // λ = 0 leaves a diagonal Hamiltonian.
    const Matrix h0 = evaluate_hamiltonian(build_tls_probe(0.0, 2.0, 4).hamiltonian, 0.0).matrix();
    CHECK((h0 - Matrix(h0.diagonal().asDiagonal())).norm() < 1e-15);
}

TEST_CASE("cpb energy basis") {
    // σ_x is diagonal with |g⟩ the −1 eigenvector.
    const Operator sx = cpb_pauli(Axis::X);
    CHECK(std::abs(expectation(sx, cpb_ground()) + 1.0) < 1e-15);
    CHECK(std::abs(expectation(sx, cpb_excited()) - 1.0) < 1e-15);
    const Operator sy = cpb_pauli(Axis::Y), sz = cpb_pauli(Axis::Z);
    const cplx two_i(0.0, 2.0);
    CHECK(norm_of(commutator(sx, sy) - two_i * sz) < 1e-14);
    CHECK(norm_of(commutator(sy, sz) - two_i * sx) < 1e-14);
    // τ₊ raises |g⟩ to |e⟩, and τ₊ + τ₋ is the charge-basis σ_z.
    const Vector up = cpb_raising().matrix() * cpb_ground().amplitudes();
    CHECK((up - cpb_excited().amplitudes()).norm() < 1e-15);
    CHECK(norm_of(cpb_raising() + cpb_lowering() - sz) < 1e-15);
}

TEST_CASE("cpb rwa conserves excitations") {
    const ModelSpec m = cpb_spec(Frame::Rwa);
    const auto parts = build_cpb_reduced(m);
    const Operator h = parts.hamiltonian[0].op;
    const SpaceLayout& L = m.dims;
    const Operator excitations =
        embed(number(6), L, 0) + 0.5 * (embed(cpb_pauli(Axis::X), L, 1) + identity(12));
    CHECK(norm_of(commutator(h, excitations)) < 1e-12);
    CHECK(norm_of(commutator(h, parts.measured)) > 1e-3);
}

TEST_CASE("cpb lab frame") {
    const ModelSpec m = cpb_spec(Frame::Lab);
    CHECK(m.resolved_delta() == doctest::Approx(3.0));
    const auto parts = build_cpb_reduced(m);
    REQUIRE(parts.hamiltonian.size() == 2);
    CHECK(parts.hamiltonian[1].modulation.kind == Modulation::Kind::Cosine);
    CHECK(parts.hamiltonian[1].modulation.at(0.0) == doctest::Approx(1.0));
    CHECK(parts.hamiltonian[1].modulation.at(constants::pi / 3.0) == doctest::Approx(-1.0));
    CHECK(evaluate_hamiltonian(parts.hamiltonian, 0.4).is_hermitian());
    ModelSpec fixed = m;
    fixed.delta = 2.5;
    CHECK(fixed.resolved_delta() == 2.5);
}

TEST_CASE("thermal factor and channels") {
    const double omega = 2.0 * constants::pi * 1e8;
    CHECK(xi_factor(0.0, omega) == 1.0);
    CHECK(xi_factor(6e-3, omega) == doctest::Approx(2.632).epsilon(1e-3));
    CHECK(xi_factor(32e-3, omega) == doctest::Approx(13.36).epsilon(1e-3));
    const SpaceLayout L{6, 2};
    const auto cold = thermal_dissipators(0.1, 0.0, omega, L);
    REQUIRE(cold.size() == 2);
    CHECK(cold[0].rate == doctest::Approx(0.2));
    CHECK(cold[1].rate == doctest::Approx(0.1));
    CHECK(norm_of(cold[0].op - 0.5 * embed(destroy(6), L, 0)) < 1e-15);
    const auto cpb = cpb_dissipators(0.3, L);
    REQUIRE(cpb.size() == 2);
    CHECK(cpb[0].rate == 0.3);
    CHECK(norm_of(cpb[1].op - 0.5 * embed(cpb_pauli(Axis::X), L, 1)) < 1e-15);
}

TEST_CASE("model errors") {
    auto code = [](auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidConfig;
    };
    CHECK(code([] { thermal_dissipators(-1.0, 0.0, 1.0, SpaceLayout{3, 2}); }) == ErrorCode::NegativeRate);
    CHECK(code([] { cpb_dissipators(-1.0, SpaceLayout{3, 2}); }) == ErrorCode::NegativeRate);
    ModelSpec m;
    m.frame = Frame::Lab;
    CHECK(code([&] { build_model(m); }) == ErrorCode::FrameUnsupported);
    m.scenario = Scenario::TlsProbe;
    m.frame = Frame::Rwa;
    m.dims = SpaceLayout{4, 2};
    CHECK(code([&] { build_model(m); }) == ErrorCode::FrameUnsupported);
    m.scenario = Scenario::CpbReduced;
    m.dims = SpaceLayout{4, 3};
    CHECK(code([&] { build_model(m); }) == ErrorCode::InvalidDimension);
    CHECK(parse_scenario(to_string(Scenario::TlsProbe)) == Scenario::TlsProbe);
    CHECK(parse_frame("Lab") == Frame::Lab);
    CHECK(code([] { parse_frame("rotating"); }) == ErrorCode::ParseError);
}

TEST_CASE("build_model observables") {
    ModelSpec m;
    m.dims = SpaceLayout{4, 3};
    m.Gamma = 0.1;
    const ModelSystem sys = build_model(m);
    CHECK(sys.observables.count("N_R"));
    CHECK(sys.observables.count("N_P"));
    CHECK(sys.observables.count("P_R:3"));
    CHECK_FALSE(sys.observables.count("sigma_x"));
    CHECK(sys.dissipators.size() == 2);
    CHECK(sys.oscillator_slots.size() == 2);

    ModelSpec c = cpb_spec(Frame::Rwa);
    c.gamma_CPB = 0.5;
    const ModelSystem cs = build_model(c);
    CHECK(cs.dissipators.size() == 2);
    CHECK(cs.observables.at("sigma_x").matrix().isApprox(cs.measured.matrix()));
    CHECK(cs.oscillator_slots.size() == 1);
}
