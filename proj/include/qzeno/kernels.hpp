#pragma once

// Inner-loop kernels for the stochastic integrators. Operators are stored
// dense at the API level; here they are compiled once into CSR or real
// diagonal form, which is what the per-step right-hand sides use.

#include <vector>

#include <Eigen/Sparse>

#include "qzeno/hilbert.hpp"
#include "qzeno/models.hpp"

namespace qzeno::kernels {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Block edge for loops that read a matrix and its transpose together.
inline constexpr Index kTile = 16;
/// Most diagonals a real operator may occupy and still use the banded kernels.
inline constexpr std::size_t kMaxBands = 12;

class CompiledOp {
public:
    CompiledOp() = default;
    explicit CompiledOp(const Operator& op);

    Index dim() const noexcept { return dim_; }
    bool is_diagonal() const noexcept { return diagonal_; }
    /// Real diagonal entries; meaningful only when is_diagonal().
    const Eigen::VectorXd& diag() const noexcept { return diag_; }
    const SparseMatrix& sparse() const noexcept { return sparse_; }
    bool is_banded() const noexcept { return !band_offsets_.empty(); }

    /// out = A·in
    void apply(const Vector& in, Vector& out) const;
    /// out = in·A†
    void right_adjoint(const Matrix& in, Matrix& out) const;
    /// acc += −i·coef·[A, ρ](:, j) for Hermitian A
    void add_liouville_column(const Matrix& rho, Index j, double coef, cplx* acc) const;
    /// acc += coef·{A, ρ}(:, j); diagonal or banded A only.
    void add_anticommutator_column(const Matrix& rho, Index j, double coef, cplx* acc) const;
    /// acc += coef·(AρA†)(:, j); diagonal or banded A only.
    void add_sandwich_column(const Matrix& rho, Index j, double coef, cplx* acc) const;
    /// Re tr(Aρ)
    double trace_product(const Matrix& rho) const;
    /// Re ⟨ψ|A|ψ⟩
    double expect(const Vector& psi) const;

private:
    Index dim_ = 0;
    bool diagonal_ = false;
    Eigen::VectorXd diag_;
    SparseMatrix sparse_;
    std::vector<Index> band_offsets_;
    Eigen::MatrixXd band_values_;  // (i, d) = A(i, i + offset_d)
};

struct Channel {
    CompiledOp c;
    CompiledOp c_dag_c;
    double rate = 0.0;
};

/// Scratch buffers owned by one integrator instance.
struct Workspace {
    Matrix m1, m2, m3;
    Vector v1, v2, v3;
};

/// Pre-compiled right-hand side of the conditioned dynamics.
class CompiledSystem {
public:
    CompiledSystem() = default;
    CompiledSystem(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured, double k,
                   const std::vector<Dissipator>& dissipators);

    Index dim() const noexcept { return dim_; }
    double k() const noexcept { return k_; }
    const CompiledOp& measured() const noexcept { return x_; }
    bool has_dissipators() const noexcept { return !channels_.empty(); }

    /// −i[H(t),ρ] − k[X,[X,ρ]] + Σ rate·𝒟[c]ρ
    void sme_drift(double t, const Matrix& rho, Matrix& out, Workspace& ws) const;
    /// True when column j of the drift depends only on a few columns of ρ,
    /// i.e. the measured operator and every channel are diagonal or banded.
    bool column_local() const noexcept;
    /// Hamiltonian modulation factors at time t, in term order.
    void coefficients(double t, std::vector<double>& out) const;
    /// Column j of the drift; requires column_local().
    void local_drift_column(const std::vector<double>& coef, const Matrix& rho, Index j, cplx* dst) const;
    /// Column j of the diffusion coefficient, given ⟨X⟩; requires column_local().
    void local_diffusion_column(double mean, const Matrix& rho, Index j, cplx* dst) const;
    /// √(2k)(Xρ + ρX − 2⟨X⟩ρ), ⟨X⟩ = tr(Xρ)
    void sme_diffusion(const Matrix& rho, Matrix& out, Workspace& ws) const;

    /// −iH(t)ψ − k(X − ⟨X⟩)²ψ
    void sse_drift(double t, const Vector& psi, Vector& out, Workspace& ws) const;
    /// √(2k)(X − ⟨X⟩)ψ
    void sse_diffusion(const Vector& psi, Vector& out, Workspace& ws) const;

private:
    Index dim_ = 0;
    std::vector<CompiledOp> h_ops_;
    std::vector<Modulation> h_mod_;
    CompiledOp x_;
    CompiledOp x_sq_;
    double k_ = 0.0;
    std::vector<Channel> channels_;
};

/// max|A − A†|
double hermiticity_error(const Matrix& m);
/// Returns max|A − A†| (NaN if any entry is non-finite), then scales A by 1/trace.
double normalize_checked(Matrix& m, double trace);

}  // namespace qzeno::kernels
