#pragma once

/**
 * @file
 * Dense operator and state algebra on truncated Fock and qubit spaces.
 *
 * Tensor ordering is resonator (slot 0) ⊗ probe (slot 1). Operators and
 * states are immutable values once built; every constructor validates its
 * invariants and throws qzeno::Error otherwise.
 */

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "qzeno/error.hpp"

namespace qzeno {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

class Operator {
public:
    Operator() = default;
    /// Throws InvalidDimension for a non-square or empty matrix, NanDetected for non-finite entries.
    explicit Operator(Matrix m);

    Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    cplx operator()(Index i, Index j) const { return m_(i, j); }

    double max_abs() const;
    /// max|A − A†|
    double hermiticity_error() const;
    /// max|A − A†| ≤ tol·max|A|
    bool is_hermitian(double tol = 1e-12) const;

    Operator operator+(const Operator& o) const;
    Operator operator-(const Operator& o) const;
    Operator operator*(const Operator& o) const;
    Operator operator*(cplx s) const;
    friend Operator operator*(cplx s, const Operator& a) { return a * s; }

private:
    Matrix m_;
};

class StateVector {
public:
    StateVector() = default;
    /// Normalizes the amplitudes. Throws on a zero or non-finite vector.
    explicit StateVector(Vector amplitudes);

    Index dim() const noexcept { return amps_.size(); }
    const Vector& amplitudes() const noexcept { return amps_; }
    cplx operator[](Index i) const { return amps_(i); }

private:
    Vector amps_;
};

/// Invariant report for a density matrix (computed on demand).
struct DensityCheck {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    bool ok = false;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    /// Stores the matrix as given; use check() to verify the physical invariants.
    explicit DensityMatrix(Matrix rho);
    explicit DensityMatrix(const StateVector& psi);

    Index dim() const noexcept { return rho_.rows(); }
    const Matrix& matrix() const noexcept { return rho_; }
    cplx operator()(Index i, Index j) const { return rho_(i, j); }

    double purity() const;
    DensityCheck check() const;

private:
    Matrix rho_;
};

/// Subsystem dimensions, leftmost factor = nanoresonator, then probe.
class SpaceLayout {
public:
    static constexpr std::size_t kResonator = 0;
    static constexpr std::size_t kProbe = 1;

    SpaceLayout() = default;
    SpaceLayout(std::initializer_list<Index> dims) : SpaceLayout(std::vector<Index>(dims)) {}
    explicit SpaceLayout(std::vector<Index> dims);

    const std::vector<Index>& factor_dims() const noexcept { return dims_; }
    Index factor(std::size_t slot) const;
    std::size_t num_factors() const noexcept { return dims_.size(); }
    Index total_dim() const noexcept;

    bool operator==(const SpaceLayout&) const = default;

private:
    std::vector<Index> dims_;
};

enum class Axis { X, Y, Z };

Operator destroy(Index dim);
Operator create(Index dim);
Operator number(Index dim);
Operator position(Index dim);
Operator identity(Index dim);
Operator pauli(Axis axis);
/// |n⟩⟨n| on a dim-level space
Operator projector(Index dim, Index n);

Operator dagger(const Operator& a);
Operator commutator(const Operator& a, const Operator& b);
Operator kron(const Operator& a, const Operator& b);
/// A on subsystem `slot`, identity on every other factor.
Operator embed(const Operator& a, const SpaceLayout& layout, std::size_t slot);

StateVector fock_state(Index dim, Index n);
/// Truncated coherent state, renormalized. Throws ExcessiveTruncationLeakage
/// when the discarded population Σ_{n≥dim}|c_n|² reaches `max_leakage`.
StateVector coherent_state(Index dim, cplx alpha, double max_leakage = 1e-6);
/// Discarded population of a coherent state truncated to `dim` levels.
double coherent_truncation_leakage(Index dim, cplx alpha);
StateVector kron(const StateVector& a, const StateVector& b);

cplx expectation(const Operator& a, const StateVector& psi);
cplx expectation(const Operator& a, const DensityMatrix& rho);
/// ⟨A²⟩ − ⟨A⟩²; A is assumed Hermitian.
double variance(const Operator& a, const StateVector& psi);
double variance(const Operator& a, const DensityMatrix& rho);

/// Real part of a Hermitian expectation; throws if the imaginary part exceeds `tol`.
double real_expectation(const Operator& a, const StateVector& psi, double tol = 1e-10);
double real_expectation(const Operator& a, const DensityMatrix& rho, double tol = 1e-10);

}  // namespace qzeno
