#include "qzeno/models.hpp"

#include <cmath>

namespace qzeno {

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::RwaOscillators: return "RwaOscillators";
        case Scenario::TlsProbe: return "TlsProbe";
        case Scenario::CpbReduced: return "CpbReduced";
    }
    return "?";
}

const char* to_string(Frame f) { return f == Frame::Lab ? "Lab" : "Rwa"; }

Scenario parse_scenario(const std::string& s) {
    if (s == "RwaOscillators") return Scenario::RwaOscillators;
    if (s == "TlsProbe") return Scenario::TlsProbe;
    if (s == "CpbReduced") return Scenario::CpbReduced;
    throw Error(ErrorCode::ParseError, "unknown scenario '" + s + "'");
}

Frame parse_frame(const std::string& s) {
    if (s == "Lab") return Frame::Lab;
    if (s == "Rwa") return Frame::Rwa;
    throw Error(ErrorCode::ParseError, "unknown frame '" + s + "'");
}

double Modulation::at(double t) const {
    return kind == Kind::Constant ? 1.0 : std::cos(freq * t);
}

Operator evaluate_hamiltonian(const std::vector<HamiltonianTerm>& terms, double t) {
    if (terms.empty()) throw Error(ErrorCode::InvalidDimension, "empty Hamiltonian");
    Matrix h = Matrix::Zero(terms.front().op.dim(), terms.front().op.dim());
    for (const auto& term : terms) h += term.modulation.at(t) * term.op.matrix();
    return Operator(std::move(h));
}

namespace {

void require_rate(double rate, const char* name) {
    if (!(rate >= 0.0)) throw Error(ErrorCode::NegativeRate, std::string(name) + " must be ≥ 0");
}

}  // namespace

ModelParts build_rwa_oscillators(double lambda, const SpaceLayout& dims) {
    if (dims.num_factors() != 2) throw Error(ErrorCode::InvalidDimension, "need [d_R, d_P]");
    const Operator a = embed(destroy(dims.factor(0)), dims, SpaceLayout::kResonator);
    const Operator b = embed(destroy(dims.factor(1)), dims, SpaceLayout::kProbe);
    const Operator h = lambda * (a * dagger(b) + b * dagger(a));
    return {{{h, Modulation::constant()}}, embed(number(dims.factor(1)), dims, SpaceLayout::kProbe)};
}

ModelParts build_tls_probe(double lambda, double omega_R, Index d_R) {
    const SpaceLayout dims{d_R, 2};
    const Operator n_r = embed(number(d_R), dims, SpaceLayout::kResonator);
    const Operator x_r = embed(position(d_R), dims, SpaceLayout::kResonator);
    const Operator sz = embed(pauli(Axis::Z), dims, SpaceLayout::kProbe);
    const Operator sx = embed(pauli(Axis::X), dims, SpaceLayout::kProbe);
    const Operator h = omega_R * n_r + (0.5 * omega_R) * sz + lambda * (sx * x_r);
    return {{{h, Modulation::constant()}}, sz};
}

// CPB operators are represented in the energy basis {|g⟩, |e⟩} at the
// degeneracy point, i.e. the σ_x eigenbasis with |g⟩ = (|0⟩ − |1⟩)/√2 and
// |e⟩ = (|0⟩ + |1⟩)/√2 in terms of the charge states.

StateVector cpb_ground() { return fock_state(2, 0); }

StateVector cpb_excited() { return fock_state(2, 1); }

Operator cpb_pauli(Axis axis) {
    switch (axis) {
        case Axis::X: return -1.0 * pauli(Axis::Z);
        case Axis::Y: return pauli(Axis::Y);
        case Axis::Z: return pauli(Axis::X);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown axis");
}

Operator cpb_lowering() {
    return Operator(cpb_ground().amplitudes() * cpb_excited().amplitudes().adjoint());
}

Operator cpb_raising() { return dagger(cpb_lowering()); }

ModelParts build_cpb_reduced(const ModelSpec& spec) {
    if (spec.scenario != Scenario::CpbReduced) {
        throw Error(ErrorCode::FrameUnsupported, "build_cpb_reduced needs scenario CpbReduced");
    }
    const SpaceLayout& dims = spec.dims;
    if (dims.num_factors() != 2 || dims.factor(1) != 2) {
        throw Error(ErrorCode::InvalidDimension, "CpbReduced needs layout [d_R, 2]");
    }
    const Index d_R = dims.factor(0);
    const Operator sx = embed(cpb_pauli(Axis::X), dims, SpaceLayout::kProbe);
    if (spec.frame == Frame::Rwa) {
        const Operator a = embed(destroy(d_R), dims, SpaceLayout::kResonator);
        const Operator tp = embed(cpb_raising(), dims, SpaceLayout::kProbe);
        const Operator h = (0.5 * spec.lambda) * (a * tp + dagger(a) * dagger(tp));
        return {{{h, Modulation::constant()}}, sx};
    }
    const Operator n_r = embed(number(d_R), dims, SpaceLayout::kResonator);
    const Operator x_r = embed(position(d_R), dims, SpaceLayout::kResonator);
    const Operator sz = embed(cpb_pauli(Axis::Z), dims, SpaceLayout::kProbe);
    std::vector<HamiltonianTerm> terms;
    terms.push_back({spec.omega_R * n_r + (0.5 * spec.E_J_over_hbar) * sx, Modulation::constant()});
    terms.push_back({spec.lambda * (sz * x_r), Modulation::cosine(spec.resolved_delta())});
    return {std::move(terms), sx};
}

double xi_factor(double T, double omega_R) {
    if (T <= 0.0) return 1.0;
    const double x = constants::hbar * omega_R / (2.0 * constants::k_B * T);
    return 1.0 / std::tanh(x);
}

std::vector<Dissipator> thermal_dissipators(double Gamma, double T, double omega_R,
                                            const SpaceLayout& layout) {
    require_rate(Gamma, "Gamma");
    require_rate(T, "T");
    const double xi = xi_factor(T, omega_R);
    const Operator a = embed(destroy(layout.factor(SpaceLayout::kResonator)), layout,
                             SpaceLayout::kResonator);
    return {{0.5 * a, Gamma * (xi + 1.0), "thermal_down"},
            {0.5 * dagger(a), Gamma * xi, "thermal_up"}};
}

std::vector<Dissipator> cpb_dissipators(double gamma_CPB, const SpaceLayout& layout) {
    require_rate(gamma_CPB, "gamma_CPB");
    if (layout.factor(SpaceLayout::kProbe) != 2) {
        throw Error(ErrorCode::InvalidDimension, "CPB dissipators need a two-level probe slot");
    }
    return {{embed(0.5 * cpb_lowering(), layout, SpaceLayout::kProbe), gamma_CPB, "cpb_damping"},
            {embed(0.5 * cpb_pauli(Axis::X), layout, SpaceLayout::kProbe), gamma_CPB, "cpb_dephasing"}};
}

ModelSystem build_model(const ModelSpec& spec) {
    require_rate(spec.lambda, "lambda");
    require_rate(spec.k, "k");
    require_rate(spec.Gamma, "Gamma");
    require_rate(spec.gamma_CPB, "gamma_CPB");
    require_rate(spec.T, "T");

    ModelSystem sys;
    sys.layout = spec.dims;
    sys.k = spec.k;
    ModelParts parts;
    switch (spec.scenario) {
        case Scenario::RwaOscillators:
            if (spec.frame != Frame::Rwa) {
                throw Error(ErrorCode::FrameUnsupported, "RwaOscillators runs in the Rwa frame only");
            }
            parts = build_rwa_oscillators(spec.lambda, spec.dims);
            break;
        case Scenario::TlsProbe:
            if (spec.frame != Frame::Lab) {
                throw Error(ErrorCode::FrameUnsupported, "TlsProbe runs in the Lab frame only");
            }
            if (spec.dims.num_factors() != 2 || spec.dims.factor(1) != 2) {
                throw Error(ErrorCode::InvalidDimension, "TlsProbe needs layout [d_R, 2]");
            }
            parts = build_tls_probe(spec.lambda, spec.omega_R, spec.dims.factor(0));
            break;
        case Scenario::CpbReduced:
            parts = build_cpb_reduced(spec);
            break;
    }
    sys.hamiltonian = std::move(parts.hamiltonian);
    sys.measured = std::move(parts.measured);

    const SpaceLayout& L = spec.dims;
    if (spec.Gamma > 0.0) {
        for (auto& d : thermal_dissipators(spec.Gamma, spec.T, spec.omega_R, L)) {
            sys.dissipators.push_back(std::move(d));
        }
    }
    if (spec.scenario == Scenario::CpbReduced && spec.gamma_CPB > 0.0) {
        for (auto& d : cpb_dissipators(spec.gamma_CPB, L)) sys.dissipators.push_back(std::move(d));
    }

    const Index d_R = L.factor(SpaceLayout::kResonator);
    sys.observables["N_R"] = embed(number(d_R), L, SpaceLayout::kResonator);
    sys.observables["x_R"] = embed(position(d_R), L, SpaceLayout::kResonator);
    for (Index n = 0; n < d_R; ++n) {
        sys.observables["P_R:" + std::to_string(n)] =
            embed(projector(d_R, n), L, SpaceLayout::kResonator);
    }
    sys.oscillator_slots.push_back(SpaceLayout::kResonator);
    if (spec.scenario == Scenario::RwaOscillators) {
        const Index d_P = L.factor(SpaceLayout::kProbe);
        sys.observables["N_P"] = embed(number(d_P), L, SpaceLayout::kProbe);
        sys.observables["N_tot"] = sys.observables["N_R"] + sys.observables["N_P"];
        sys.oscillator_slots.push_back(SpaceLayout::kProbe);
    } else {
        const bool cpb = spec.scenario == Scenario::CpbReduced;
        auto sigma = [&](Axis a) { return embed(cpb ? cpb_pauli(a) : pauli(a), L, SpaceLayout::kProbe); };
        sys.observables["sigma_x"] = sigma(Axis::X);
        sys.observables["sigma_y"] = sigma(Axis::Y);
        sys.observables["sigma_z"] = sigma(Axis::Z);
    }
    return sys;
}

}  // namespace qzeno
