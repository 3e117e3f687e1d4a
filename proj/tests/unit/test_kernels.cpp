#include <doctest.h>

#include <random>

#include "qzeno/kernels.hpp"
#include "qzeno/models.hpp"

using namespace qzeno;
using kernels::CompiledOp;
using kernels::CompiledSystem;

namespace {

Matrix random_matrix(Index d, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> n;
    Matrix m(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i, j) = cplx(n(gen), n(gen));
    return m;
}

Matrix random_density(Index d, unsigned seed) {
    const Matrix a = random_matrix(d, seed);
    Matrix rho = a * a.adjoint();
    return rho / rho.trace();
}

Operator random_hermitian(Index d, unsigned seed) {
    const Matrix a = random_matrix(d, seed);
    return Operator(0.5 * (a + a.adjoint()));
}

Matrix dissipator(const Matrix& c, const Matrix& rho) {
    const Matrix cdc = c.adjoint() * c;
    return 2.0 * c * rho * c.adjoint() - cdc * rho - rho * cdc;
}

// Dense right-hand sides of the conditioned dynamics.
Matrix ref_sme_drift(const Matrix& h, const Matrix& x, double k, const std::vector<Dissipator>& ch,
                     const Matrix& rho) {
    const cplx i(0.0, 1.0);
    const Matrix xr = x * rho - rho * x;
    Matrix out = -i * (h * rho - rho * h) - k * (x * xr - xr * x);
    for (const auto& d : ch) out += d.rate * dissipator(d.op.matrix(), rho);
    return out;
}

Matrix ref_sme_diffusion(const Matrix& x, double k, const Matrix& rho) {
    const cplx mean = (x * rho).trace();
    return std::sqrt(2.0 * k) * (x * rho + rho * x - 2.0 * mean * rho);
}

struct Case {
    const char* name;
    Operator h;
    Operator x;
    std::vector<Dissipator> channels;
};

std::vector<Case> cases() {
    const SpaceLayout L{6, 2};
    const Index d = 12;
    const Operator a = embed(destroy(6), L, 0);
    const Operator n = embed(number(6), L, 0);
    const Operator sx = embed(cpb_pauli(Axis::X), L, 1);
    const Operator sz = embed(cpb_pauli(Axis::Z), L, 1);
    const Operator xr = embed(position(6), L, 0);
    std::vector<Case> out;
    // Diagonal X, real banded and single-entry channels: column-local path.
    out.push_back({"diagonal measurement", 0.7 * (a * embed(cpb_raising(), L, 1)) +
                                               0.7 * dagger(a * embed(cpb_raising(), L, 1)) + 0.3 * n,
                   sx, {{0.5 * a, 0.2, "down"}, {0.5 * dagger(a), 0.1, "up"}, {0.5 * sx, 0.3, "deph"}}});
    // Banded real X.
    out.push_back({"banded measurement", 0.4 * (sz * xr) + n, xr, {{a, 0.05, "down"}}});
    // Dense Hermitian X and a complex channel: whole-matrix fallback.
    out.push_back({"dense measurement", random_hermitian(d, 3), random_hermitian(d, 4),
                   {{Operator(random_matrix(d, 5) * 0.2), 0.3, "dense"}}});
    // Complex banded Hamiltonian (σ_y has imaginary entries).
    out.push_back({"complex hamiltonian", 0.5 * embed(cpb_pauli(Axis::Y), L, 1) + 0.2 * (xr * sx), n, {}});
    return out;
}

}  // namespace

TEST_CASE("compiled operators match dense algebra") {
    const Index d = 12;
    const Matrix rho = random_density(d, 11);
    const SpaceLayout L{6, 2};
    const std::vector<std::pair<const char*, Operator>> ops = {
        {"diagonal", embed(number(6), L, 0)},
        {"banded", embed(position(6), L, 0) + 0.3 * embed(cpb_pauli(Axis::Z), L, 1)},
        {"complex banded", embed(cpb_pauli(Axis::Y), L, 1)},
        {"dense", random_hermitian(d, 2)}};
    for (const auto& [name, op] : ops) {
        CAPTURE(name);
        const CompiledOp c(op);
        const Matrix& A = op.matrix();
        Vector v = rho.col(3), out;
        c.apply(v, out);
        CHECK((out - A * v).norm() < 1e-12);
        Matrix r;
        c.right_adjoint(rho, r);
        CHECK((r - rho * A.adjoint()).norm() < 1e-12);
        CHECK(c.trace_product(rho) == doctest::Approx((A * rho).trace().real()));
        CHECK(c.expect(v) == doctest::Approx((v.adjoint() * A * v)(0).real()));

        const cplx i(0.0, 1.0);
        const Matrix comm = -i * 0.7 * (A * rho - rho * A);
        for (Index j = 0; j < d; ++j) {
            Vector acc = Vector::Zero(d);
            c.add_liouville_column(rho, j, 0.7, acc.data());
            CHECK((acc - comm.col(j)).norm() < 1e-12);
        }
        if (c.is_diagonal() || c.is_banded()) {
            const Matrix anti = 0.4 * (A * rho + rho * A);
            const Matrix sand = 0.4 * (A * rho * A.adjoint());
            for (Index j = 0; j < d; ++j) {
                Vector acc = Vector::Zero(d);
                c.add_anticommutator_column(rho, j, 0.4, acc.data());
                CHECK((acc - anti.col(j)).norm() < 1e-12);
                acc.setZero();
                c.add_sandwich_column(rho, j, 0.4, acc.data());
                CHECK((acc - sand.col(j)).norm() < 1e-12);
            }
        }
    }
    CHECK(CompiledOp(embed(number(6), L, 0)).is_diagonal());
    CHECK(CompiledOp(embed(position(6), L, 0)).is_banded());
    CHECK_FALSE(CompiledOp(random_hermitian(d, 2)).is_banded());
    CHECK_THROWS_AS(CompiledOp(random_hermitian(d, 2)).add_sandwich_column(rho, 0, 1.0, Vector(d).data()),
                    Error);
}

TEST_CASE("compiled system right-hand sides") {
    const double k = 0.8;
    for (const auto& c : cases()) {
        CAPTURE(c.name);
        const Index d = c.h.dim();
        const CompiledSystem sys({{c.h, Modulation::constant()}}, c.x, k, c.channels);
        kernels::Workspace ws;
        const Matrix rho = random_density(d, 21);
        Matrix out;
        sys.sme_drift(0.0, rho, out, ws);
        const Matrix ref = ref_sme_drift(c.h.matrix(), c.x.matrix(), k, c.channels, rho);
        CHECK((out - ref).norm() < 1e-11 * (1.0 + ref.norm()));
        sys.sme_diffusion(rho, out, ws);
        CHECK((out - ref_sme_diffusion(c.x.matrix(), k, rho)).norm() < 1e-11);

        if (sys.column_local()) {
            std::vector<double> coef;
            sys.coefficients(0.0, coef);
            const double mean = sys.measured().trace_product(rho);
            const Matrix diff = ref_sme_diffusion(c.x.matrix(), k, rho);
            for (Index j = 0; j < d; ++j) {
                Vector col(d);
                sys.local_drift_column(coef, rho, j, col.data());
                CHECK((col - ref.col(j)).norm() < 1e-11);
                sys.local_diffusion_column(mean, rho, j, col.data());
                CHECK((col - diff.col(j)).norm() < 1e-11);
            }
        }
    }
    CHECK(CompiledSystem({}, number(4), 1.0, {}).column_local());
    CHECK_FALSE(CompiledSystem({}, random_hermitian(4, 1), 1.0, {}).column_local());
}

TEST_CASE("time-dependent hamiltonian terms") {
    const SpaceLayout L{5, 2};
    const Operator h0 = embed(number(5), L, 0);
    const Operator h1 = embed(position(5), L, 0) * embed(cpb_pauli(Axis::Z), L, 1);
    const Operator x = embed(cpb_pauli(Axis::X), L, 1);
    const std::vector<HamiltonianTerm> terms = {{h0, Modulation::constant()}, {h1, Modulation::cosine(2.0)}};
    const CompiledSystem sys(terms, x, 0.5, {});
    kernels::Workspace ws;
    const Matrix rho = random_density(10, 4);
    for (double t : {0.0, 0.3, 1.7}) {
        Matrix out;
        sys.sme_drift(t, rho, out, ws);
        const Matrix h = evaluate_hamiltonian(terms, t).matrix();
        CHECK((out - ref_sme_drift(h, x.matrix(), 0.5, {}, rho)).norm() < 1e-12);
    }
}

TEST_CASE("projector dynamics of the SSE reproduce the SME") {
    // With dψ = a dt + b dW, Itô calculus gives dρ = (aψ† + ψa† + bb†)dt + (bψ† + ψb†)dW.
    // Both coefficients must coincide with the SME drift and diffusion at ρ = |ψ⟩⟨ψ|.
    const SpaceLayout L{6, 2};
    const double k = 1.3;
    const Operator h = 0.4 * (embed(destroy(6), L, 0) * embed(cpb_raising(), L, 1));
    const Operator hh = h + dagger(h) + embed(number(6), L, 0);
    for (const Operator& x : {embed(cpb_pauli(Axis::X), L, 1), random_hermitian(12, 9)}) {
        const CompiledSystem sys({{hh, Modulation::constant()}}, x, k, {});
        kernels::Workspace ws;
        Vector psi = random_matrix(12, 17).col(0);
        psi.normalize();
        Vector a, b;
        sys.sse_drift(0.0, psi, a, ws);
        sys.sse_diffusion(psi, b, ws);
        const Matrix rho = psi * psi.adjoint();
        Matrix drift, diffusion;
        sys.sme_drift(0.0, rho, drift, ws);
        sys.sme_diffusion(rho, diffusion, ws);
        const Matrix ito_drift = a * psi.adjoint() + psi * a.adjoint() + b * b.adjoint();
        const Matrix ito_diffusion = b * psi.adjoint() + psi * b.adjoint();
        CHECK((ito_drift - drift).norm() < 1e-12);
        CHECK((ito_diffusion - diffusion).norm() < 1e-12);
    }
}

TEST_CASE("hermiticity error and normalization") {
    Matrix m = random_density(20, 1);
    CHECK(kernels::hermiticity_error(m) < 1e-15);
    m(3, 17) += cplx(1e-6, 0.0);
    CHECK(kernels::hermiticity_error(m) == doctest::Approx(1e-6).epsilon(1e-6));
    Matrix s = 2.0 * random_density(20, 2);
    const double herm = kernels::normalize_checked(s, s.trace().real());
    CHECK(herm < 1e-14);
    CHECK(std::abs(s.trace() - 1.0) < 1e-14);
    s(0, 0) = std::numeric_limits<double>::infinity();
    CHECK(std::isnan(kernels::normalize_checked(s, 1.0)));
}
