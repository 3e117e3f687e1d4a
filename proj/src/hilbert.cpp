#include "qzeno/hilbert.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace qzeno {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidDimension: return "invalid-dimension";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::ExcessiveTruncationLeakage: return "excessive-truncation-leakage";
        case ErrorCode::NegativeRate: return "negative-rate";
        case ErrorCode::FrameUnsupported: return "frame-unsupported-for-scenario";
        case ErrorCode::NanDetected: return "nan-detected";
        case ErrorCode::DimensionTooLarge: return "dimension-too-large";
        case ErrorCode::InvalidSchedule: return "invalid-schedule";
        case ErrorCode::EmptySeries: return "empty-series";
        case ErrorCode::MissingObservable: return "missing-observable";
        case ErrorCode::InvalidCase: return "invalid-case";
        case ErrorCode::IoError: return "io-error";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::NonpositiveInput: return "nonpositive-input";
        case ErrorCode::TrajectoryFailed: return "trajectory-failed";
        case ErrorCode::NonHermitian: return "non-hermitian";
        case ErrorCode::InvalidConfig: return "invalid-config";
    }
    return "unknown";
}

namespace {

void require_dim(Index dim, Index min_dim = 2) {
    if (dim < min_dim) {
        throw Error(ErrorCode::InvalidDimension,
                    "dimension " + std::to_string(dim) + " < " + std::to_string(min_dim));
    }
}

void require_same_dim(Index a, Index b, const char* what) {
    if (a != b) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) {
        throw Error(ErrorCode::InvalidDimension, "operator must be square and non-empty");
    }
    if (!m_.allFinite()) throw Error(ErrorCode::NanDetected, "operator has non-finite entries");
}

double Operator::max_abs() const { return m_.cwiseAbs().maxCoeff(); }

double Operator::hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }

bool Operator::is_hermitian(double tol) const {
    const double scale = max_abs();
    return hermiticity_error() <= tol * (scale > 0.0 ? scale : 1.0);
}

Operator Operator::operator+(const Operator& o) const {
    require_same_dim(dim(), o.dim(), "operator sum");
    return Operator(m_ + o.m_);
}

Operator Operator::operator-(const Operator& o) const {
    require_same_dim(dim(), o.dim(), "operator difference");
    return Operator(m_ - o.m_);
}

Operator Operator::operator*(const Operator& o) const {
    require_same_dim(dim(), o.dim(), "operator product");
    return Operator(m_ * o.m_);
}

Operator Operator::operator*(cplx s) const { return Operator(m_ * s); }

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() == 0) throw Error(ErrorCode::InvalidDimension, "empty state vector");
    const double n = amps_.norm();
    if (!std::isfinite(n)) throw Error(ErrorCode::NanDetected, "state vector has non-finite entries");
    if (n == 0.0) throw Error(ErrorCode::InvalidDimension, "zero state vector");
    amps_ /= n;
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
        throw Error(ErrorCode::InvalidDimension, "density matrix must be square and non-empty");
    }
    if (!rho_.allFinite()) throw Error(ErrorCode::NanDetected, "density matrix has non-finite entries");
}

DensityMatrix::DensityMatrix(const StateVector& psi)
    : rho_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityCheck DensityMatrix::check() const {
    DensityCheck c;
    c.trace_error = std::abs(rho_.trace() - cplx(1.0, 0.0));
    c.hermiticity_error = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    c.ok = c.trace_error <= 1e-8 && c.hermiticity_error <= 1e-10 && c.min_eigenvalue >= -1e-6;
    return c;
}

SpaceLayout::SpaceLayout(std::vector<Index> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw Error(ErrorCode::InvalidDimension, "layout needs at least one factor");
    for (Index d : dims_) require_dim(d);
}

Index SpaceLayout::factor(std::size_t slot) const {
    if (slot >= dims_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "slot " + std::to_string(slot) + " out of range");
    }
    return dims_[slot];
}

Index SpaceLayout::total_dim() const noexcept {
    Index total = 1;
    for (Index d : dims_) total *= d;
    return total;
}

// ---------------------------------------------------------------------------
// Builders

Operator destroy(Index dim) {
    require_dim(dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (Index n = 1; n < dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(m));
}

Operator create(Index dim) { return dagger(destroy(dim)); }

Operator number(Index dim) {
    require_dim(dim);
    Matrix m = Matrix::Zero(dim, dim);
    for (Index n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
    return Operator(std::move(m));
}

Operator position(Index dim) {
    const Operator a = destroy(dim);
    return a + dagger(a);
}

Operator identity(Index dim) {
    require_dim(dim, 1);
    return Operator(Matrix::Identity(dim, dim));
}

Operator pauli(Axis axis) {
    Matrix m(2, 2);
    const cplx i(0.0, 1.0);
    switch (axis) {
        case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
        case Axis::Y: m << 0.0, -i, i, 0.0; break;
        case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
    }
    return Operator(std::move(m));
}

Operator projector(Index dim, Index n) {
    require_dim(dim);
    if (n < 0 || n >= dim) throw Error(ErrorCode::InvalidDimension, "projector level out of range");
    Matrix m = Matrix::Zero(dim, dim);
    m(n, n) = 1.0;
    return Operator(std::move(m));
}

Operator dagger(const Operator& a) { return Operator(a.matrix().adjoint()); }

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a.dim(), b.dim(), "commutator");
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

Operator kron(const Operator& a, const Operator& b) {
    const Index da = a.dim();
    const Index db = b.dim();
    Matrix m(da * db, da * db);
    for (Index i = 0; i < da; ++i) {
        for (Index j = 0; j < da; ++j) m.block(i * db, j * db, db, db) = a(i, j) * b.matrix();
    }
    return Operator(std::move(m));
}

Operator embed(const Operator& a, const SpaceLayout& layout, std::size_t slot) {
    require_same_dim(a.dim(), layout.factor(slot), "embed");
    Operator out;
    for (std::size_t s = 0; s < layout.num_factors(); ++s) {
        const Operator factor = (s == slot) ? a : identity(layout.factor(s));
        out = (s == 0) ? factor : kron(out, factor);
    }
    return out;
}

StateVector fock_state(Index dim, Index n) {
    require_dim(dim);
    if (n < 0 || n >= dim) throw Error(ErrorCode::InvalidDimension, "Fock level out of range");
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return StateVector(std::move(v));
}

double coherent_truncation_leakage(Index dim, cplx alpha) {
    const double x = std::norm(alpha);
    if (x == 0.0) return 0.0;
    // Poisson tail P(n ≥ dim), summed in log space until terms vanish.
    double tail = 0.0;
    for (Index n = dim; n < dim + 2000; ++n) {
        const double nd = static_cast<double>(n);
        const double log_term = -x + nd * std::log(x) - std::lgamma(nd + 1.0);
        const double term = std::exp(log_term);
        tail += term;
        if (nd > x && term < 1e-18 * tail) break;
    }
    return tail;
}

StateVector coherent_state(Index dim, cplx alpha, double max_leakage) {
    require_dim(dim);
    const double leak = coherent_truncation_leakage(dim, alpha);
    if (leak >= max_leakage) {
        throw Error(ErrorCode::ExcessiveTruncationLeakage,
                    "truncation at " + std::to_string(dim) + " levels discards " + std::to_string(leak));
    }
    Vector v(dim);
    cplx c = std::exp(-0.5 * std::norm(alpha));
    v(0) = c;
    for (Index n = 1; n < dim; ++n) {
        c *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = c;
    }
    return StateVector(std::move(v));
}

StateVector kron(const StateVector& a, const StateVector& b) {
    Vector v(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i) v.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
    return StateVector(std::move(v));
}

cplx expectation(const Operator& a, const StateVector& psi) {
    require_same_dim(a.dim(), psi.dim(), "expectation");
    return psi.amplitudes().dot(a.matrix() * psi.amplitudes());
}

cplx expectation(const Operator& a, const DensityMatrix& rho) {
    require_same_dim(a.dim(), rho.dim(), "expectation");
    return (a.matrix() * rho.matrix()).trace();
}

double variance(const Operator& a, const StateVector& psi) {
    require_same_dim(a.dim(), psi.dim(), "variance");
    const Vector ap = a.matrix() * psi.amplitudes();
    const double mean = psi.amplitudes().dot(ap).real();
    return ap.squaredNorm() - mean * mean;
}

double variance(const Operator& a, const DensityMatrix& rho) {
    require_same_dim(a.dim(), rho.dim(), "variance");
    const Matrix ar = a.matrix() * rho.matrix();
    const double mean = ar.trace().real();
    return (a.matrix() * ar).trace().real() - mean * mean;
}

namespace {

double checked_real(cplx v, double tol) {
    if (std::abs(v.imag()) > tol) {
        throw Error(ErrorCode::NonHermitian,
                    "expectation of a non-Hermitian operator: imaginary part " + std::to_string(v.imag()));
    }
    return v.real();
}

}  // namespace

double real_expectation(const Operator& a, const StateVector& psi, double tol) {
    return checked_real(expectation(a, psi), tol);
}

double real_expectation(const Operator& a, const DensityMatrix& rho, double tol) {
    return checked_real(expectation(a, rho), tol);
}

}  // namespace qzeno
