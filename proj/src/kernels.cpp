#include "qzeno/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qzeno::kernels {

CompiledOp::CompiledOp(const Operator& op) : dim_(op.dim()) {
    const Matrix& m = op.matrix();
    diagonal_ = true;
    for (Index j = 0; j < dim_ && diagonal_; ++j) {
        for (Index i = 0; i < dim_; ++i) {
            if (i != j ? m(i, j) != cplx(0.0) : m(i, i).imag() != 0.0) {
                diagonal_ = false;
                break;
            }
        }
    }
    if (diagonal_) {
        diag_ = m.diagonal().real();
        return;
    }
    std::vector<Eigen::Triplet<cplx>> triplets;
    for (Index i = 0; i < dim_; ++i) {
        for (Index j = 0; j < dim_; ++j) {
            if (m(i, j) != cplx(0.0)) triplets.emplace_back(i, j, m(i, j));
        }
    }
    sparse_.resize(dim_, dim_);
    sparse_.setFromTriplets(triplets.begin(), triplets.end());
    sparse_.makeCompressed();

    // Real operators with few occupied diagonals (ladder operators and their
    // products) also get a banded copy, which vectorizes along columns.
    std::vector<Index> offsets;
    bool real = true;
    for (const auto& tr : triplets) {
        real = real && tr.value().imag() == 0.0;
        const Index o = tr.col() - tr.row();
        if (std::find(offsets.begin(), offsets.end(), o) == offsets.end()) offsets.push_back(o);
    }
    if (real && offsets.size() <= kMaxBands) {
        std::sort(offsets.begin(), offsets.end());
        band_offsets_ = offsets;
        band_values_ = Eigen::MatrixXd::Zero(dim_, static_cast<Index>(offsets.size()));
        for (const auto& tr : triplets) {
            const auto d = std::find(offsets.begin(), offsets.end(), tr.col() - tr.row()) - offsets.begin();
            band_values_(tr.row(), d) = tr.value().real();
        }
    }
}

void CompiledOp::apply(const Vector& in, Vector& out) const {
    if (diagonal_) {
        out = diag_.cast<cplx>().cwiseProduct(in);
    } else {
        out.noalias() = sparse_ * in;
    }
}

void CompiledOp::right_adjoint(const Matrix& in, Matrix& out) const {
    out.resize(in.rows(), dim_);
    if (diagonal_) {
        for (Index j = 0; j < dim_; ++j) out.col(j) = diag_(j) * in.col(j);
        return;
    }
    if (is_banded()) {
        // (in·A†)(:, j) = Σ_d A(j, j+o_d)·in(:, j+o_d)
        const Index rows = in.rows();
        for (Index j = 0; j < dim_; ++j) {
            double* dst = reinterpret_cast<double*>(out.col(j).data());
            std::fill(dst, dst + 2 * rows, 0.0);
            for (std::size_t d = 0; d < band_offsets_.size(); ++d) {
                const Index k = j + band_offsets_[d];
                const double v = band_values_(j, static_cast<Index>(d));
                if (k < 0 || k >= dim_ || v == 0.0) continue;
                const double* src = reinterpret_cast<const double*>(in.col(k).data());
                for (Index t = 0; t < 2 * rows; ++t) dst[t] += v * src[t];
            }
        }
        return;
    }
    // Column j of in·A† combines the columns of `in` picked by row j of A.
    const int* outer = sparse_.outerIndexPtr();
    const int* inner = sparse_.innerIndexPtr();
    const cplx* val = sparse_.valuePtr();
    for (Index j = 0; j < dim_; ++j) {
        auto dst = out.col(j);
        const int p0 = outer[j];
        const int p1 = outer[j + 1];
        if (p0 == p1) {
            dst.setZero();
            continue;
        }
        dst.noalias() = std::conj(val[p0]) * in.col(inner[p0]);
        for (int p = p0 + 1; p < p1; ++p) dst.noalias() += std::conj(val[p]) * in.col(inner[p]);
    }
}

void CompiledOp::add_liouville_column(const Matrix& rho, Index j, double coef, cplx* acc) const {
    // −i·z = (Im z, −Re z)
    const cplx* r = rho.col(j).data();
    double* a = reinterpret_cast<double*>(acc);
    if (diagonal_) {
        for (Index i = 0; i < dim_; ++i) {
            const double w = coef * (diag_(i) - diag_(j));
            a[2 * i] += w * r[i].imag();
            a[2 * i + 1] -= w * r[i].real();
        }
        return;
    }
    if (is_banded()) {
        const double* rj = reinterpret_cast<const double*>(r);
        for (std::size_t d = 0; d < band_offsets_.size(); ++d) {
            const Index o = band_offsets_[d];
            const double* v = band_values_.col(static_cast<Index>(d)).data();
            // (Aρ)(i, j) = A(i, i+o)·ρ(i+o, j)
            const Index lo = std::max<Index>(0, -o);
            const Index hi = std::min(dim_, dim_ - o);
            for (Index i = lo; i < hi; ++i) {
                const double w = coef * v[i];
                a[2 * i] += w * rj[2 * (i + o) + 1];
                a[2 * i + 1] -= w * rj[2 * (i + o)];
            }
            // (ρA)(:, j) = A(j−o, j)·ρ(:, j−o)
            const Index k = j - o;
            if (k < 0 || k >= dim_ || v[k] == 0.0) continue;
            const double w = coef * v[k];
            const double* rk = reinterpret_cast<const double*>(rho.col(k).data());
            for (Index i = 0; i < dim_; ++i) {
                a[2 * i] -= w * rk[2 * i + 1];
                a[2 * i + 1] += w * rk[2 * i];
            }
        }
        return;
    }
    const int* outer = sparse_.outerIndexPtr();
    const int* inner = sparse_.innerIndexPtr();
    const cplx* val = sparse_.valuePtr();
    const cplx mi(0.0, -coef);
    for (Index i = 0; i < dim_; ++i) {
        cplx s(0.0);
        for (int p = outer[i]; p < outer[i + 1]; ++p) s += val[p] * r[inner[p]];
        acc[i] += mi * s;
    }
    // (ρA)(:,j) = Σ_k ρ(:,k)·conj(A(j,k)) for Hermitian A
    for (int p = outer[j]; p < outer[j + 1]; ++p) {
        const cplx w = mi * std::conj(val[p]);
        const cplx* rk = rho.col(inner[p]).data();
        for (Index i = 0; i < dim_; ++i) acc[i] -= w * rk[i];
    }
}

void CompiledOp::add_anticommutator_column(const Matrix& rho, Index j, double coef, cplx* acc) const {
    const cplx* r = rho.col(j).data();
    if (diagonal_) {
        for (Index i = 0; i < dim_; ++i) acc[i] += (coef * (diag_(i) + diag_(j))) * r[i];
        return;
    }
    if (!is_banded()) throw Error(ErrorCode::InvalidConfig, "anticommutator column needs a banded operator");
    double* a = reinterpret_cast<double*>(acc);
    const double* rj = reinterpret_cast<const double*>(r);
    for (std::size_t d = 0; d < band_offsets_.size(); ++d) {
        const Index o = band_offsets_[d];
        const double* v = band_values_.col(static_cast<Index>(d)).data();
        const Index lo = std::max<Index>(0, -o);
        const Index hi = std::min(dim_, dim_ - o);
        for (Index i = lo; i < hi; ++i) {
            const double w = coef * v[i];
            a[2 * i] += w * rj[2 * (i + o)];
            a[2 * i + 1] += w * rj[2 * (i + o) + 1];
        }
        const Index k = j - o;
        if (k < 0 || k >= dim_ || v[k] == 0.0) continue;
        const double w = coef * v[k];
        const double* rk = reinterpret_cast<const double*>(rho.col(k).data());
        for (Index t = 0; t < 2 * dim_; ++t) a[t] += w * rk[t];
    }
}

void CompiledOp::add_sandwich_column(const Matrix& rho, Index j, double coef, cplx* acc) const {
    if (diagonal_) {
        const cplx* r = rho.col(j).data();
        for (Index i = 0; i < dim_; ++i) acc[i] += (coef * diag_(i) * diag_(j)) * r[i];
        return;
    }
    if (!is_banded()) throw Error(ErrorCode::InvalidConfig, "sandwich column needs a banded operator");
    // (AρAᵀ)(i, j) = Σ_e A(j, j+o_e)·Σ_d A(i, i+o_d)·ρ(i+o_d, j+o_e)
    double* a = reinterpret_cast<double*>(acc);
    for (std::size_t e = 0; e < band_offsets_.size(); ++e) {
        const Index l = j + band_offsets_[e];
        if (l < 0 || l >= dim_) continue;
        const double we = coef * band_values_(j, static_cast<Index>(e));
        if (we == 0.0) continue;
        const double* rl = reinterpret_cast<const double*>(rho.col(l).data());
        for (std::size_t d = 0; d < band_offsets_.size(); ++d) {
            const Index o = band_offsets_[d];
            const double* v = band_values_.col(static_cast<Index>(d)).data();
            const Index lo = std::max<Index>(0, -o);
            const Index hi = std::min(dim_, dim_ - o);
            for (Index i = lo; i < hi; ++i) {
                const double w = we * v[i];
                a[2 * i] += w * rl[2 * (i + o)];
                a[2 * i + 1] += w * rl[2 * (i + o) + 1];
            }
        }
    }
}

double CompiledOp::trace_product(const Matrix& rho) const {
    double acc = 0.0;
    if (diagonal_) {
        for (Index i = 0; i < dim_; ++i) acc += diag_(i) * rho(i, i).real();
        return acc;
    }
    cplx sum(0.0);
    for (Index i = 0; i < sparse_.outerSize(); ++i) {
        for (SparseMatrix::InnerIterator it(sparse_, i); it; ++it) sum += it.value() * rho(it.col(), i);
    }
    return sum.real();
}

double CompiledOp::expect(const Vector& psi) const {
    if (diagonal_) {
        double acc = 0.0;
        for (Index i = 0; i < dim_; ++i) acc += diag_(i) * std::norm(psi(i));
        return acc;
    }
    return psi.dot(sparse_ * psi).real();
}

CompiledSystem::CompiledSystem(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured,
                               double k, const std::vector<Dissipator>& dissipators)
    : dim_(measured.dim()), x_(measured), x_sq_(measured * measured), k_(k) {
    // Constant terms are summed into one operator; modulated ones stay separate.
    std::optional<Operator> constant;
    for (const auto& term : hamiltonian) {
        if (term.op.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "Hamiltonian term dimension");
        if (term.modulation.kind == Modulation::Kind::Constant) {
            constant = constant ? *constant + term.op : term.op;
        } else {
            h_ops_.emplace_back(term.op);
            h_mod_.push_back(term.modulation);
        }
    }
    if (constant) {
        h_ops_.insert(h_ops_.begin(), CompiledOp(*constant));
        h_mod_.insert(h_mod_.begin(), Modulation{});
    }
    for (const auto& d : dissipators) {
        if (d.op.dim() != dim_) throw Error(ErrorCode::DimensionMismatch, "dissipator dimension");
        if (d.rate < 0.0) throw Error(ErrorCode::NegativeRate, d.label);
        if (d.rate == 0.0) continue;
        channels_.push_back({CompiledOp(d.op), CompiledOp(dagger(d.op) * d.op), d.rate});
    }
}

void CompiledSystem::coefficients(double t, std::vector<double>& out) const {
    out.resize(h_ops_.size());
    for (std::size_t n = 0; n < h_ops_.size(); ++n) out[n] = h_mod_[n].at(t);
}

bool CompiledSystem::column_local() const noexcept {
    auto local = [](const CompiledOp& op) { return op.is_diagonal() || op.is_banded(); };
    if (k_ > 0.0 && !local(x_)) return false;
    for (const auto& ch : channels_) {
        if (!local(ch.c) || !local(ch.c_dag_c)) return false;
    }
    return true;
}

void CompiledSystem::local_drift_column(const std::vector<double>& coef, const Matrix& rho, Index j,
                                        cplx* dst) const {
    if (k_ > 0.0 && x_.is_diagonal()) {
        const double* x = x_.diag().data();
        const cplx* r = rho.col(j).data();
        for (Index i = 0; i < dim_; ++i) {
            const double d = x[i] - x[j];
            dst[i] = -(k_ * d * d) * r[i];
        }
    } else {
        std::fill(dst, dst + dim_, cplx(0.0));
        if (k_ > 0.0) {
            // −k[X,[X,ρ]] = −k({X², ρ} − 2XρX)
            x_sq_.add_anticommutator_column(rho, j, -k_, dst);
            x_.add_sandwich_column(rho, j, 2.0 * k_, dst);
        }
    }
    for (std::size_t n = 0; n < h_ops_.size(); ++n) h_ops_[n].add_liouville_column(rho, j, coef[n], dst);
    for (const auto& ch : channels_) {
        ch.c.add_sandwich_column(rho, j, 2.0 * ch.rate, dst);
        ch.c_dag_c.add_anticommutator_column(rho, j, -ch.rate, dst);
    }
}

void CompiledSystem::local_diffusion_column(double mean, const Matrix& rho, Index j, cplx* dst) const {
    const double amp = std::sqrt(2.0 * k_);
    const cplx* r = rho.col(j).data();
    for (Index i = 0; i < dim_; ++i) dst[i] = (-2.0 * amp * mean) * r[i];
    x_.add_anticommutator_column(rho, j, amp, dst);
}

void CompiledSystem::sme_drift(double t, const Matrix& rho, Matrix& out, Workspace& ws) const {
    out.resize(dim_, dim_);
    std::vector<double> coef;
    coefficients(t, coef);
    if (column_local()) {
        for (Index j = 0; j < dim_; ++j) local_drift_column(coef, rho, j, out.col(j).data());
        return;
    }
    // General operators: Hamiltonian part column by column, then the rest on whole matrices.
    for (Index j = 0; j < dim_; ++j) {
        cplx* dst = out.col(j).data();
        std::fill(dst, dst + dim_, cplx(0.0));
        for (std::size_t n = 0; n < h_ops_.size(); ++n) h_ops_[n].add_liouville_column(rho, j, coef[n], dst);
    }
    const bool diag_x = k_ > 0.0 && x_.is_diagonal();
    if (diag_x) {
        const double* x = x_.diag().data();
        for (Index j = 0; j < dim_; ++j) {
            for (Index i = 0; i < dim_; ++i) out(i, j) -= (k_ * (x[i] - x[j]) * (x[i] - x[j])) * rho(i, j);
        }
    }

    if (k_ > 0.0 && !diag_x) {
        x_.right_adjoint(rho, ws.m1);     // ρX
        x_.right_adjoint(ws.m1, ws.m2);   // ρX²
        ws.m3 = ws.m1.adjoint();          // Xρ
        x_.right_adjoint(ws.m3, ws.m1);   // XρX
        out -= k_ * (ws.m2 + ws.m2.adjoint() - 2.0 * ws.m1);
    }

    for (const auto& ch : channels_) {
        ch.c.right_adjoint(rho, ws.m1);       // ρc†
        ws.m3 = ws.m1.adjoint();              // cρ
        ch.c.right_adjoint(ws.m3, ws.m2);     // cρc†
        ch.c_dag_c.right_adjoint(rho, ws.m3); // ρc†c
        out += ch.rate * (2.0 * ws.m2 - ws.m3 - ws.m3.adjoint());
    }
}

void CompiledSystem::sme_diffusion(const Matrix& rho, Matrix& out, Workspace& ws) const {
    const double mean = x_.trace_product(rho);
    const double amp = std::sqrt(2.0 * k_);
    out.resize(dim_, dim_);
    if (x_.is_diagonal()) {
        const auto& x = x_.diag();
        for (Index j = 0; j < dim_; ++j) {
            for (Index i = 0; i < dim_; ++i) out(i, j) = amp * (x(i) + x(j) - 2.0 * mean) * rho(i, j);
        }
        return;
    }
    x_.right_adjoint(rho, ws.m1);  // ρX
    for (Index j = 0; j < dim_; ++j) {
        for (Index i = 0; i < dim_; ++i) {
            out(i, j) = amp * (ws.m1(i, j) + std::conj(ws.m1(j, i)) - 2.0 * mean * rho(i, j));
        }
    }
}

void CompiledSystem::sse_drift(double t, const Vector& psi, Vector& out, Workspace& ws) const {
    const cplx minus_i(0.0, -1.0);
    out.setZero(dim_);
    for (std::size_t n = 0; n < h_ops_.size(); ++n) {
        h_ops_[n].apply(psi, ws.v1);
        out += (minus_i * h_mod_[n].at(t)) * ws.v1;
    }
    if (k_ > 0.0) {
        const double mean = x_.expect(psi) / psi.squaredNorm();
        x_.apply(psi, ws.v1);
        ws.v1 -= mean * psi;       // (X − m)ψ
        x_.apply(ws.v1, ws.v2);
        ws.v2 -= mean * ws.v1;     // (X − m)²ψ
        out -= k_ * ws.v2;
    }
}

void CompiledSystem::sse_diffusion(const Vector& psi, Vector& out, Workspace& ws) const {
    const double mean = x_.expect(psi) / psi.squaredNorm();
    x_.apply(psi, ws.v1);
    out = std::sqrt(2.0 * k_) * (ws.v1 - mean * psi);
}

double normalize_checked(Matrix& m, double trace) {
    const Index n = m.rows();
    const double inv = 1.0 / trace;
    double err = 0.0;
    bool finite = true;
    // Tile pairs (ib, jb) and (jb, ib) are checked, then scaled, together.
    for (Index jb = 0; jb < n; jb += kTile) {
        const Index je = std::min(jb + kTile, n);
        for (Index ib = 0; ib <= jb; ib += kTile) {
            const Index ie = std::min(ib + kTile, n);
            for (Index j = jb; j < je; ++j) {
                for (Index i = ib; i < std::min(ie, j + 1); ++i) {
                    const double e = std::norm(m(i, j) - std::conj(m(j, i)));
                    finite = finite && std::isfinite(e);
                    err = std::max(err, e);
                }
            }
            m.block(ib, jb, ie - ib, je - jb) *= inv;
            if (ib != jb) m.block(jb, ib, je - jb, ie - ib) *= inv;
        }
    }
    return finite ? std::sqrt(err) : std::numeric_limits<double>::quiet_NaN();
}

double hermiticity_error(const Matrix& m) {
    const Index n = m.rows();
    double err = 0.0;
    bool finite = true;
    for (Index jb = 0; jb < n; jb += kTile) {
        const Index je = std::min(jb + kTile, n);
        for (Index ib = 0; ib <= jb; ib += kTile) {
            const Index ie = std::min(ib + kTile, n);
            for (Index j = jb; j < je; ++j) {
                for (Index i = ib; i < std::min(ie, j + 1); ++i) {
                    const double e = std::norm(m(i, j) - std::conj(m(j, i)));
                    finite = finite && std::isfinite(e);
                    err = std::max(err, e);
                }
            }
        }
    }
    // NaN or Inf anywhere propagates as a non-finite error.
    return finite ? std::sqrt(err) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace qzeno::kernels
