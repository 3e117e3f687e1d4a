#include "qzeno/dynamics.hpp"

#include <cmath>
#include <memory>
#include <optional>

#include <Eigen/Sparse>
#if defined(__SSE__)
#include <xmmintrin.h>
#endif
#include <unsupported/Eigen/KroneckerProduct>

#include "qzeno/noise.hpp"

namespace qzeno {

const char* to_string(Method m) {
    return m == Method::EulerMaruyama ? "EulerMaruyama" : "HeunDriftEulerNoise";
}

const char* to_string(Unraveling u) { return u == Unraveling::Sse ? "SSE" : "SME"; }

Method parse_method(const std::string& s) {
    if (s == "EulerMaruyama") return Method::EulerMaruyama;
    if (s == "HeunDriftEulerNoise") return Method::HeunDriftEulerNoise;
    throw Error(ErrorCode::ParseError, "unknown integrator method '" + s + "'");
}

Unraveling parse_unraveling(const std::string& s) {
    if (s == "SSE") return Unraveling::Sse;
    if (s == "SME") return Unraveling::Sme;
    throw Error(ErrorCode::ParseError, "unknown unraveling '" + s + "'");
}

// ---------------------------------------------------------------------------
// IntegratorConfig

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidConfig, "dt must be > 0");
    if (!(t_final >= dt)) throw Error(ErrorCode::InvalidConfig, "t_final must be ≥ dt");
    if (snapshot_stride < 1) throw Error(ErrorCode::InvalidConfig, "snapshot_stride must be ≥ 1");
    if (lambda_schedule.empty()) return;
    if (lambda_schedule.front().t_start != 0.0) {
        throw Error(ErrorCode::InvalidSchedule, "first schedule entry must start at t = 0");
    }
    for (std::size_t i = 0; i < lambda_schedule.size(); ++i) {
        if (!(lambda_schedule[i].lambda >= 0.0)) throw Error(ErrorCode::NegativeRate, "scheduled lambda");
        if (i > 0 && !(lambda_schedule[i].t_start > lambda_schedule[i - 1].t_start)) {
            throw Error(ErrorCode::InvalidSchedule, "schedule times must be strictly increasing");
        }
    }
}

std::int64_t IntegratorConfig::num_steps() const {
    return static_cast<std::int64_t>(std::llround(t_final / dt));
}

double IntegratorConfig::lambda_at(double t, double base) const {
    double lambda = base;
    for (const auto& seg : lambda_schedule) {
        if (t >= seg.t_start) lambda = seg.lambda;
    }
    return lambda;
}

double record_increment(double x_expect, double k, double dt, double dW) {
    if (!(k > 0.0)) throw Error(ErrorCode::NonpositiveInput, "record_increment needs k > 0");
    return x_expect * dt + dW / std::sqrt(8.0 * k);
}

// ---------------------------------------------------------------------------
// Steppers

SmeIntegrator::SmeIntegrator(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured,
                             double k, const std::vector<Dissipator>& dissipators, Method method)
    : sys_(hamiltonian, measured, k, dissipators), method_(method) {}

Matrix SmeIntegrator::increment(const Matrix& rho, double t, double dt, double dW) {
    sys_.sme_drift(t, rho, a0_, ws_);
    sys_.sme_diffusion(rho, b0_, ws_);
    if (method_ == Method::EulerMaruyama) return dt * a0_ + dW * b0_;
    pred_ = rho + dt * a0_ + dW * b0_;
    sys_.sme_drift(t + dt, pred_, a1_, ws_);
    return (0.5 * dt) * (a0_ + a1_) + dW * b0_;
}

StepDiagnostics SmeIntegrator::step(Matrix& rho, double t, double dt, double dW) {
    const Index n = rho.rows();
    const cplx tr_old = rho.trace();
    const kernels::CompiledOp& x = sys_.measured();
    cplx tr_new(0.0);
    if (sys_.column_local()) {
        // Fused sweeps: each drift column is consumed as soon as it is formed.
        const bool diag_x = x.is_diagonal();
        const double mean = x.trace_product(rho);
        const double amp = std::sqrt(2.0 * sys_.k()) * dW;
        const double* xd = diag_x ? x.diag().data() : nullptr;
        col_.resize(n);
        noise_col_.resize(n);
        cplx* a = col_.data();
        cplx* bn = noise_col_.data();
        // Column j of ρ + b(ρ)dW written to dst.
        auto noisy = [&](Index j, cplx* dst) {
            if (diag_x) {
                // b(ρ) = √(2k)(xᵢ + xⱼ − 2⟨X⟩)ρᵢⱼ
                for (Index i = 0; i < n; ++i) dst[i] = (1.0 + amp * (xd[i] + xd[j] - 2.0 * mean)) * rho(i, j);
            } else {
                sys_.local_diffusion_column(mean, rho, j, dst);
                for (Index i = 0; i < n; ++i) dst[i] = rho(i, j) + dW * dst[i];
            }
        };
        sys_.coefficients(t, coef0_);
        b0_.resize(n, n);
        if (method_ == Method::EulerMaruyama) {
            for (Index j = 0; j < n; ++j) {
                sys_.local_drift_column(coef0_, rho, j, a);
                noisy(j, bn);
                for (Index i = 0; i < n; ++i) b0_(i, j) = bn[i] + dt * a[i];
                tr_new += b0_(j, j);
            }
            rho.swap(b0_);
        } else {
            // b0 ← ρ + b dW + a₀dt/2, predictor = b0 + a₀dt/2, result = b0 + a₁dt/2
            const double h = 0.5 * dt;
            pred_.resize(n, n);
            for (Index j = 0; j < n; ++j) {
                sys_.local_drift_column(coef0_, rho, j, a);
                noisy(j, bn);
                for (Index i = 0; i < n; ++i) {
                    const cplx base = bn[i] + h * a[i];
                    b0_(i, j) = base;
                    pred_(i, j) = base + h * a[i];
                }
            }
            sys_.coefficients(t + dt, coef1_);
            for (Index j = 0; j < n; ++j) {
                sys_.local_drift_column(coef1_, pred_, j, a);
                for (Index i = 0; i < n; ++i) rho(i, j) = b0_(i, j) + h * a[i];
                tr_new += rho(j, j);
            }
        }
    } else {
        sys_.sme_drift(t, rho, a0_, ws_);
        sys_.sme_diffusion(rho, b0_, ws_);
        b0_ = rho + dW * b0_;
        if (method_ == Method::EulerMaruyama) {
            rho.noalias() = b0_ + dt * a0_;
        } else {
            pred_.noalias() = b0_ + dt * a0_;
            sys_.sme_drift(t + dt, pred_, a1_, ws_);
            rho.noalias() = b0_ + (0.5 * dt) * (a0_ + a1_);
        }
        tr_new = rho.trace();
    }
    StepDiagnostics d;
    d.trace_drift = std::abs(tr_new - tr_old);
    if (!std::isfinite(tr_new.real()) || !(tr_new.real() > 0.0)) {
        throw Error(ErrorCode::NanDetected, "non-finite density matrix after SME step (dt too large?)");
    }
    d.hermiticity_error = kernels::normalize_checked(rho, tr_new.real());
    if (!std::isfinite(d.hermiticity_error)) {
        throw Error(ErrorCode::NanDetected, "non-finite density matrix after SME step (dt too large?)");
    }
    return d;
}

SseIntegrator::SseIntegrator(const std::vector<HamiltonianTerm>& hamiltonian, const Operator& measured,
                             double k, Method method)
    : sys_(hamiltonian, measured, k, {}), method_(method) {}

StepDiagnostics SseIntegrator::step(Vector& psi, double t, double dt, double dW) {
    sys_.sse_drift(t, psi, a0_, ws_);
    sys_.sse_diffusion(psi, b0_, ws_);
    pred_ = psi + dt * a0_ + dW * b0_;
    if (method_ == Method::HeunDriftEulerNoise) {
        sys_.sse_drift(t + dt, pred_, a1_, ws_);
        pred_ = psi + (0.5 * dt) * (a0_ + a1_) + dW * b0_;
    }
    const double norm = pred_.norm();
    if (!std::isfinite(norm) || norm == 0.0) {
        throw Error(ErrorCode::NanDetected, "non-finite state vector after SSE step (dt too large?)");
    }
    StepDiagnostics d;
    d.trace_drift = std::abs(norm - psi.norm());
    psi.swap(pred_);
    psi /= norm;
    return d;
}

DensityMatrix sme_step(const DensityMatrix& rho, const std::vector<HamiltonianTerm>& hamiltonian, double t,
                       const Operator& measured, double k, const std::vector<Dissipator>& dissipators,
                       double dt, double dW, Method method, StepDiagnostics* diag) {
    if (measured.dim() != rho.dim()) throw Error(ErrorCode::DimensionMismatch, "sme_step");
    SmeIntegrator integ(hamiltonian, measured, k, dissipators, method);
    Matrix m = rho.matrix();
    const StepDiagnostics d = integ.step(m, t, dt, dW);
    if (diag) *diag = d;
    return DensityMatrix(std::move(m));
}

StateVector sse_step(const StateVector& psi, const std::vector<HamiltonianTerm>& hamiltonian, double t,
                     const Operator& measured, double k, double dt, double dW, Method method,
                     StepDiagnostics* diag) {
    if (measured.dim() != psi.dim()) throw Error(ErrorCode::DimensionMismatch, "sse_step");
    SseIntegrator integ(hamiltonian, measured, k, method);
    Vector v = psi.amplitudes();
    const StepDiagnostics d = integ.step(v, t, dt, dW);
    if (diag) *diag = d;
    return StateVector(std::move(v));
}

// ---------------------------------------------------------------------------
// Trajectories

namespace {

struct RecordedObservable {
    std::string name;
    kernels::CompiledOp op;
    kernels::CompiledOp op_sq;
};

// Basis indices at which some oscillator factor sits in its top level.
std::vector<std::vector<Index>> top_level_indices(const SpaceLayout& layout,
                                                  const std::vector<std::size_t>& slots) {
    std::vector<std::vector<Index>> out;
    const auto& dims = layout.factor_dims();
    for (std::size_t slot : slots) {
        Index stride = 1;
        for (std::size_t s = slot + 1; s < dims.size(); ++s) stride *= dims[s];
        std::vector<Index> idx;
        for (Index i = 0; i < layout.total_dim(); ++i) {
            if ((i / stride) % dims[slot] == dims[slot] - 1) idx.push_back(i);
        }
        out.push_back(std::move(idx));
    }
    return out;
}

// Measurement dephasing drives far off-diagonal coherences toward underflow;
// subnormal arithmetic there slows the kernels several-fold. Flush them to
// zero for the duration of a trajectory and restore the caller's mode.
class FlushSubnormals {
public:
#if defined(__SSE__)
    FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }  // FTZ | DAZ
    ~FlushSubnormals() { _mm_setcsr(saved_); }

private:
    unsigned int saved_;
#endif
};

class Runner {
public:
    virtual ~Runner() = default;
    virtual StepDiagnostics step(double t, double dt, double dW) = 0;
    virtual double measured_expectation() const = 0;
    virtual double expect(const kernels::CompiledOp& op) const = 0;
    virtual double population(Index i) const = 0;
    virtual InitialState state() const = 0;
};

class SseRunner final : public Runner {
public:
    SseRunner(const ModelSystem& sys, Vector psi, Method m)
        : integ_(sys.hamiltonian, sys.measured, sys.k, m), psi_(std::move(psi)) {}
    void rebuild(const ModelSystem& sys, Method m) { integ_ = SseIntegrator(sys.hamiltonian, sys.measured, sys.k, m); }
    StepDiagnostics step(double t, double dt, double dW) override { return integ_.step(psi_, t, dt, dW); }
    double measured_expectation() const override { return integ_.measured_expectation(psi_); }
    double expect(const kernels::CompiledOp& op) const override { return op.expect(psi_); }
    double population(Index i) const override { return std::norm(psi_(i)); }
    InitialState state() const override { return StateVector(psi_); }

private:
    SseIntegrator integ_;
    Vector psi_;
};

class SmeRunner final : public Runner {
public:
    SmeRunner(const ModelSystem& sys, Matrix rho, Method m)
        : integ_(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, m), rho_(std::move(rho)) {}
    void rebuild(const ModelSystem& sys, Method m) {
        integ_ = SmeIntegrator(sys.hamiltonian, sys.measured, sys.k, sys.dissipators, m);
    }
    StepDiagnostics step(double t, double dt, double dW) override { return integ_.step(rho_, t, dt, dW); }
    double measured_expectation() const override { return integ_.measured_expectation(rho_); }
    double expect(const kernels::CompiledOp& op) const override { return op.trace_product(rho_); }
    double population(Index i) const override { return rho_(i, i).real(); }
    InitialState state() const override { return DensityMatrix(rho_); }

private:
    SmeIntegrator integ_;
    Matrix rho_;
};

struct Segment {
    std::int64_t start_step;
    double lambda;
};

std::vector<Segment> segments_for(const IntegratorConfig& cfg, double base_lambda) {
    if (cfg.lambda_schedule.empty()) return {{0, base_lambda}};
    std::vector<Segment> segs;
    for (const auto& s : cfg.lambda_schedule) {
        const auto start = static_cast<std::int64_t>(std::ceil(s.t_start / cfg.dt - 1e-9));
        segs.push_back({start, s.lambda});
    }
    return segs;
}

}  // namespace

TrajectoryResult run_trajectory(const ModelFactory& factory, double base_lambda, const InitialState& init,
                                const IntegratorConfig& cfg, const std::vector<std::string>& observables,
                                std::uint64_t trajectory_index) {
    cfg.validate();
    const FlushSubnormals ftz;
    const std::int64_t n_steps = cfg.num_steps();
    const std::vector<Segment> segments = segments_for(cfg, base_lambda);
    std::size_t seg = 0;
    ModelSystem sys = factory(segments[0].lambda);
    const Index dim = sys.layout.total_dim();

    const Index init_dim = std::visit([](const auto& s) { return s.dim(); }, init);
    if (init_dim != dim) throw Error(ErrorCode::DimensionMismatch, "initial state vs model dimension");

    std::vector<RecordedObservable> recorded;
    for (const auto& name : observables) {
        auto it = sys.observables.find(name);
        if (it == sys.observables.end()) throw Error(ErrorCode::MissingObservable, name);
        recorded.push_back({name, kernels::CompiledOp(it->second), kernels::CompiledOp(it->second * it->second)});
    }
    const auto leak_idx = top_level_indices(sys.layout, sys.oscillator_slots);

    std::unique_ptr<Runner> runner;
    SseRunner* sse = nullptr;
    SmeRunner* sme = nullptr;
    if (cfg.unraveling == Unraveling::Sse) {
        if (!sys.dissipators.empty()) {
            throw Error(ErrorCode::InvalidConfig, "SSE unraveling does not support dissipators; use SME");
        }
        const auto* psi = std::get_if<StateVector>(&init);
        if (!psi) throw Error(ErrorCode::InvalidConfig, "SSE needs a pure initial state");
        auto r = std::make_unique<SseRunner>(sys, psi->amplitudes(), cfg.method);
        sse = r.get();
        runner = std::move(r);
    } else {
        const Matrix rho0 = std::holds_alternative<StateVector>(init)
                                ? DensityMatrix(std::get<StateVector>(init)).matrix()
                                : std::get<DensityMatrix>(init).matrix();
        auto r = std::make_unique<SmeRunner>(sys, rho0, cfg.method);
        sme = r.get();
        runner = std::move(r);
    }

    TrajectoryResult res;
    res.seed = cfg.seed;
    res.trajectory_index = trajectory_index;
    res.steps = n_steps;
    for (const auto& o : recorded) {
        res.exp_series[o.name];
        res.var_series[o.name];
    }

    auto leakage = [&]() {
        double worst = 0.0;
        for (const auto& idx : leak_idx) {
            double p = 0.0;
            for (Index i : idx) p += runner->population(i);
            worst = std::max(worst, p);
        }
        return worst;
    };
    double record_acc = 0.0;
    auto snapshot = [&](double t) {
        res.times.push_back(t);
        for (const auto& o : recorded) {
            const double m = runner->expect(o.op);
            res.exp_series[o.name].push_back(m);
            res.var_series[o.name].push_back(runner->expect(o.op_sq) - m * m);
        }
        res.record.push_back(record_acc);
        record_acc = 0.0;
    };

    res.max_leakage = leakage();
    snapshot(0.0);
    const NoiseStream noise(cfg.seed, trajectory_index);
    for (std::int64_t n = 0; n < n_steps; ++n) {
        if (seg + 1 < segments.size() && n >= segments[seg + 1].start_step) {
            ++seg;
            sys = factory(segments[seg].lambda);
            if (sse) sse->rebuild(sys, cfg.method);
            if (sme) sme->rebuild(sys, cfg.method);
        }
        const double t = static_cast<double>(n) * cfg.dt;
        const double dW = noise.increment(static_cast<std::uint64_t>(n), cfg.dt);
        const double x = runner->measured_expectation();
        record_acc += sys.k > 0.0 ? record_increment(x, sys.k, cfg.dt, dW) : x * cfg.dt;
        StepDiagnostics d;
        try {
            d = runner->step(t, cfg.dt, dW);
        } catch (const Error& e) {
            const std::string where = std::string(e.what()) + " [step " + std::to_string(n) + ", seed " +
                                      std::to_string(cfg.seed) + ", trajectory " +
                                      std::to_string(trajectory_index) + "]";
            if (!cfg.keep_partial_on_failure) throw Error(e.code(), where);
            res.failed = true;
            res.failure = where;
            break;
        }
        res.max_trace_drift = std::max(res.max_trace_drift, d.trace_drift);
        res.max_hermiticity_error = std::max(res.max_hermiticity_error, d.hermiticity_error);
        res.max_leakage = std::max(res.max_leakage, leakage());
        if ((n + 1) % cfg.snapshot_stride == 0 || n + 1 == n_steps) {
            snapshot(static_cast<double>(n + 1) * cfg.dt);
        }
    }
    res.leakage_exceeded = res.max_leakage >= kLeakageLimit;
    res.final_state = runner->state();
    return res;
}

TrajectoryResult run_trajectory(const ModelSpec& model, const InitialState& init, const IntegratorConfig& cfg,
                                const std::vector<std::string>& observables, std::uint64_t trajectory_index) {
    const ModelFactory factory = [&model](double lambda) {
        ModelSpec m = model;
        m.lambda = lambda;
        return build_model(m);
    };
    return run_trajectory(factory, model.lambda, init, cfg, observables, trajectory_index);
}

TrajectoryResult run_trajectory(const ModelSystem& system, const InitialState& init,
                                const IntegratorConfig& cfg, const std::vector<std::string>& observables,
                                std::uint64_t trajectory_index) {
    if (!cfg.lambda_schedule.empty()) {
        throw Error(ErrorCode::InvalidSchedule, "a prebuilt system cannot follow a lambda schedule");
    }
    const ModelFactory factory = [&system](double) { return system; };
    return run_trajectory(factory, 0.0, init, cfg, observables, trajectory_index);
}

// ---------------------------------------------------------------------------
// Unconditional oracle

namespace {

using SuperOp = Eigen::SparseMatrix<cplx>;

SuperOp to_sparse(const Matrix& m) { return m.sparseView(); }

// vec(AρB) = (Bᵀ ⊗ A) vec(ρ), column-major vec.
SuperOp left(const Matrix& a) {
    SuperOp id(a.rows(), a.rows());
    id.setIdentity();
    return Eigen::kroneckerProduct(id, to_sparse(a)).eval();
}

SuperOp right(const Matrix& b) {
    SuperOp id(b.rows(), b.rows());
    id.setIdentity();
    return Eigen::kroneckerProduct(to_sparse(Matrix(b.transpose())), id).eval();
}

SuperOp sandwich(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(to_sparse(Matrix(b.transpose())), to_sparse(a)).eval();
}

}  // namespace

UnconditionalResult unconditional_evolve(const DensityMatrix& rho0,
                                         const std::vector<HamiltonianTerm>& hamiltonian,
                                         const Operator& measured, double k,
                                         const std::vector<Dissipator>& dissipators, double dt,
                                         double t_final, int stride) {
    const Index d = rho0.dim();
    if (d > kMaxUnconditionalDim) {
        throw Error(ErrorCode::DimensionTooLarge,
                    "superoperator oracle limited to dim " + std::to_string(kMaxUnconditionalDim));
    }
    if (measured.dim() != d) throw Error(ErrorCode::DimensionMismatch, "unconditional_evolve");
    if (!(dt > 0.0) || !(t_final >= dt) || stride < 1) {
        throw Error(ErrorCode::InvalidConfig, "unconditional_evolve needs dt > 0, t_final ≥ dt, stride ≥ 1");
    }
    const cplx minus_i(0.0, -1.0);

    SuperOp fixed(d * d, d * d);
    std::vector<SuperOp> modulated;
    std::vector<Modulation> mods;
    for (const auto& term : hamiltonian) {
        if (term.op.dim() != d) throw Error(ErrorCode::DimensionMismatch, "Hamiltonian term dimension");
        const Matrix& h = term.op.matrix();
        SuperOp l = minus_i * (left(h) - right(h));
        if (term.modulation.kind == Modulation::Kind::Constant) {
            fixed += l;
        } else {
            modulated.push_back(std::move(l));
            mods.push_back(term.modulation);
        }
    }
    {
        const Matrix& x = measured.matrix();
        const Matrix x2 = x * x;
        fixed += (-k) * (left(x2) + right(x2) - 2.0 * sandwich(x, x));
    }
    for (const auto& diss : dissipators) {
        if (diss.rate < 0.0) throw Error(ErrorCode::NegativeRate, diss.label);
        const Matrix& c = diss.op.matrix();
        const Matrix cdc = c.adjoint() * c;
        fixed += diss.rate * (2.0 * sandwich(c, c.adjoint()) - left(cdc) - right(cdc));
    }
    fixed.makeCompressed();

    auto apply = [&](double t, const Vector& v) {
        Vector out = fixed * v;
        for (std::size_t i = 0; i < modulated.size(); ++i) out += mods[i].at(t) * (modulated[i] * v);
        return out;
    };

    const auto n_steps = static_cast<std::int64_t>(std::llround(t_final / dt));
    UnconditionalResult res;
    Vector v = Eigen::Map<const Vector>(rho0.matrix().data(), d * d);
    auto push = [&](double t) {
        res.times.push_back(t);
        res.states.emplace_back(Matrix(Eigen::Map<const Matrix>(v.data(), d, d)));
    };
    push(0.0);
    for (std::int64_t n = 0; n < n_steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const Vector k1 = apply(t, v);
        const Vector k2 = apply(t + 0.5 * dt, v + (0.5 * dt) * k1);
        const Vector k3 = apply(t + 0.5 * dt, v + (0.5 * dt) * k2);
        const Vector k4 = apply(t + dt, v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!v.allFinite()) throw Error(ErrorCode::NanDetected, "unconditional evolution diverged");
        if ((n + 1) % stride == 0 || n + 1 == n_steps) push(static_cast<double>(n + 1) * dt);
    }
    return res;
}

}  // namespace qzeno
