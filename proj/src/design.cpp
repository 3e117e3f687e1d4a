#include "qzeno/design.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "qzeno/error.hpp"
#include "qzeno/models.hpp"

namespace qzeno {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::NonpositiveInput, std::string(name) + " must be positive and finite");
    }
}

}  // namespace

double measurement_strength(double g, double Delta, double gamma, double n_photons) {
    require_positive(g, "g");
    require_positive(Delta, "Delta");
    require_positive(gamma, "gamma");
    if (!(n_photons >= 0.0)) throw Error(ErrorCode::NonpositiveInput, "n_photons must be ≥ 0");
    const double g2 = g * g;
    return g2 * g2 * n_photons / (Delta * Delta * gamma);
}

double resonator_damping(double omega_R, double Q) {
    require_positive(omega_R, "omega_R");
    require_positive(Q, "Q");
    return omega_R / Q;
}

const RatioCheck& ValidityReport::ratio(const std::string& name) const {
    for (const auto& r : ratios) {
        if (r.name == name) return r;
    }
    throw Error(ErrorCode::MissingObservable, "no ratio " + name);
}

const QuoteCheck& ValidityReport::quote(const std::string& name) const {
    for (const auto& q : quotes) {
        if (q.name == name) return q;
    }
    throw Error(ErrorCode::MissingObservable, "no quote " + name);
}

bool ValidityReport::all_pass() const {
    for (const auto& r : ratios) {
        if (!r.pass) return false;
    }
    return true;
}

ValidityReport validity_report(const DeviceParams& p, const DesignThresholds& th) {
    require_positive(p.g, "g");
    require_positive(p.Delta, "Delta");
    require_positive(p.gamma, "gamma");
    require_positive(p.n_photons, "n_photons");
    require_positive(p.omega_S, "omega_S");
    require_positive(p.omega_R, "omega_R");
    require_positive(p.E_J_over_hbar, "E_J_over_hbar");
    require_positive(p.Q, "Q");
    require_positive(p.lambda, "lambda");
    if (!(p.T >= 0.0)) throw Error(ErrorCode::NonpositiveInput, "T must be ≥ 0");

    ValidityReport r;
    r.k = measurement_strength(p.g, p.Delta, p.gamma, p.n_photons);
    r.Gamma = resonator_damping(p.omega_R, p.Q);

    auto much_greater = [&](std::string name, double v) {
        r.ratios.push_back({std::move(name), v, ">>", v >= th.much_greater});
    };
    auto much_less = [&](std::string name, double v) {
        r.ratios.push_back({std::move(name), v, "<<", v <= 1.0 / th.much_greater});
    };
    much_greater("Delta/g", p.Delta / p.g);
    much_greater("omega_S/Delta", p.omega_S / p.Delta);
    much_greater("E_J/(hbar*Delta)", p.E_J_over_hbar / p.Delta);
    much_greater("gamma*Delta/g^2", p.gamma * p.Delta / (p.g * p.g));
    much_greater("k/Gamma", r.k / r.Gamma);
    much_less("lambda/omega_R", p.lambda / p.omega_R);

    for (const auto& [name, quoted] : p.quoted) {
        QuoteCheck q;
        q.name = name;
        q.quoted = quoted;
        if (name == "k") {
            q.recomputed = r.k;
        } else if (name == "Gamma") {
            q.recomputed = r.Gamma;
        } else {
            q.recomputed = r.ratio(name).value;
        }
        const double rel = std::abs(q.recomputed - quoted) / std::abs(quoted);
        q.agrees = rel <= th.quote_tolerance;
        std::ostringstream note;
        note << std::setprecision(6) << (q.agrees ? "agrees: " : "DISCREPANCY: ") << "quoted " << quoted
             << ", recomputed " << q.recomputed << " (relative difference " << rel << ")";
        q.note = note.str();
        r.quotes.push_back(std::move(q));
    }
    return r;
}

DeviceParams reference_device() {
    using constants::pi;
    DeviceParams p;
    p.Delta = 4.0 * pi * 1e8;
    p.g = p.Delta / 40.0;
    p.gamma = pi * 1e7;
    p.n_photons = 2e3;
    p.omega_S = 2.0 * pi * 10e9;
    p.omega_R = 2.0 * pi * 100e6;
    p.E_J_over_hbar = p.omega_S + p.Delta;
    p.Q = 1e5;
    p.T = 6e-3;
    p.lambda = 3e7;
    p.quoted = {{"k", 4e7}, {"omega_S/Delta", 50.0}, {"gamma*Delta/g^2", 20.0}, {"Gamma", 1e4}};
    return p;
}

namespace {

double angular(const KeyValueConfig& cfg, const std::string& key, const std::string& hz_key, double fallback) {
    if (cfg.has(key) && cfg.has(hz_key)) {
        throw Error(ErrorCode::ParseError, "give either " + key + " or " + hz_key + ", not both");
    }
    if (cfg.has(hz_key)) return 2.0 * constants::pi * cfg.get_double(hz_key);
    return cfg.get_double(key, fallback);
}

}  // namespace

DeviceParams device_from_config(const KeyValueConfig& cfg) {
    DeviceParams p;
    p.g = angular(cfg, "design.g", "design.g_hz", 0.0);
    p.Delta = angular(cfg, "design.Delta", "design.Delta_hz", 0.0);
    p.gamma = cfg.get_double("design.gamma", 0.0);
    p.n_photons = cfg.get_double("design.n_photons", 0.0);
    p.omega_S = angular(cfg, "design.omega_S", "design.f_S_hz", 0.0);
    p.omega_R = angular(cfg, "design.omega_R", "design.f_R_hz", 0.0);
    p.E_J_over_hbar = angular(cfg, "design.E_J_over_hbar", "design.f_J_hz", 0.0);
    p.Q = cfg.get_double("design.Q", 0.0);
    p.T = cfg.get_double("design.T", 0.0);
    p.lambda = cfg.get_double("design.lambda", 0.0);
    const std::string prefix = "quoted.";
    for (const auto& [k, v] : cfg.entries()) {
        if (k.rfind(prefix, 0) == 0) p.quoted[k.substr(prefix.size())] = parse_real(v, k);
    }
    return p;
}

DesignThresholds thresholds_from_config(const KeyValueConfig& cfg) {
    DesignThresholds t;
    t.much_greater = cfg.get_double("threshold.much_greater", t.much_greater);
    t.quote_tolerance = cfg.get_double("threshold.quote_tolerance", t.quote_tolerance);
    return t;
}

nlohmann::json to_json(const ValidityReport& r) {
    nlohmann::json j;
    j["k"] = r.k;
    j["Gamma"] = r.Gamma;
    j["all_pass"] = r.all_pass();
    for (const auto& c : r.ratios) {
        j["ratios"][c.name] = {{"value", c.value}, {"relation", c.relation}, {"flag", c.pass ? "pass" : "warn"}};
    }
    for (const auto& q : r.quotes) {
        j["quotes"][q.name] = {
            {"quoted", q.quoted}, {"recomputed", q.recomputed}, {"agrees", q.agrees}, {"note", q.note}};
    }
    return j;
}

std::string format_table(const ValidityReport& r) {
    std::ostringstream out;
    out << std::setprecision(4);
    out << "measurement strength k = " << r.k << " s^-1\n";
    out << "resonator damping Gamma = " << r.Gamma << " s^-1\n\n";
    out << std::left << std::setw(20) << "ratio" << std::setw(14) << "value" << std::setw(6) << "rel"
        << "flag\n";
    for (const auto& c : r.ratios) {
        out << std::setw(20) << c.name << std::setw(14) << c.value << std::setw(6) << c.relation
            << (c.pass ? "pass" : "WARN") << '\n';
    }
    if (!r.quotes.empty()) {
        out << "\nquoted values:\n";
        for (const auto& q : r.quotes) out << "  " << std::setw(18) << q.name << q.note << '\n';
    }
    return out.str();
}

}  // namespace qzeno
