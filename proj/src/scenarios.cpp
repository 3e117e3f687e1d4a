#include "qzeno/scenarios.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "qzeno/ensemble.hpp"

namespace qzeno {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Initial-state descriptors

std::string SubsystemInit::to_string() const {
    switch (kind) {
        case Kind::Coherent:
            return "coherent:" + format_real(alpha.real()) + "," + format_real(alpha.imag());
        case Kind::Fock: return "fock:" + std::to_string(n);
        case Kind::Ground: return "ground";
        case Kind::Excited: return "excited";
    }
    return "?";
}

SubsystemInit SubsystemInit::parse(const std::string& text) {
    const std::string s = trim(text);
    if (s == "ground") return ground();
    if (s == "excited") return {Kind::Excited, {}, 0};
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "fock" && !rest.empty()) {
        SubsystemInit i = fock(0);
        std::size_t used = 0;
        i.n = std::stoll(rest, &used);
        if (used != rest.size() || i.n < 0) throw Error(ErrorCode::ParseError, "bad Fock level in '" + s + "'");
        return i;
    }
    if (head == "coherent" && !rest.empty()) {
        const auto parts = split(rest, ',');
        if (parts.empty() || parts.size() > 2) throw Error(ErrorCode::ParseError, "bad amplitude in '" + s + "'");
        const double re = parse_real(parts[0]);
        const double im = parts.size() == 2 ? parse_real(parts[1]) : 0.0;
        return coherent({re, im});
    }
    throw Error(ErrorCode::ParseError, "unknown initial state '" + s + "' (coherent:re[,im] | fock:n | ground | excited)");
}

// ---------------------------------------------------------------------------
// RunConfig

namespace {

std::string base_observable(const std::string& column) {
    if (column.rfind("Var(", 0) == 0 && column.size() > 5 && column.back() == ')') {
        return column.substr(4, column.size() - 5);
    }
    return column;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

std::string dims_to_string(const SpaceLayout& l) {
    std::vector<std::string> parts;
    for (Index d : l.factor_dims()) parts.push_back(std::to_string(d));
    return join(parts, ",");
}

SpaceLayout parse_dims(const std::string& s) {
    std::vector<Index> dims;
    for (const auto& p : split(s, ',')) {
        const double v = parse_real(p, "model.dims");
        if (v != std::floor(v)) throw Error(ErrorCode::ParseError, "non-integer dimension '" + p + "'");
        dims.push_back(static_cast<Index>(v));
    }
    return SpaceLayout(dims);
}

std::string schedule_to_string(const std::vector<LambdaSegment>& sched) {
    std::vector<std::string> parts;
    for (const auto& s : sched) parts.push_back(format_real(s.t_start) + ":" + format_real(s.lambda));
    return join(parts, ",");
}

std::vector<LambdaSegment> parse_schedule(const std::string& s) {
    std::vector<LambdaSegment> out;
    for (const auto& p : split(s, ',')) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw Error(ErrorCode::ParseError, "schedule entry '" + p + "' needs t:lambda");
        out.push_back({parse_real(p.substr(0, colon), "integrator.lambda_schedule"),
                       parse_real(p.substr(colon + 1), "integrator.lambda_schedule")});
    }
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "format_version", "name", "model.scenario", "model.frame", "model.lambda", "model.k", "model.omega_R",
        "model.f_R_hz", "model.E_J_over_hbar", "model.f_J_hz", "model.delta", "model.Gamma", "model.T",
        "model.gamma_CPB", "model.dims", "integrator.dt", "integrator.t_final", "integrator.seed",
        "integrator.method", "integrator.unraveling", "integrator.snapshot_stride",
        "integrator.lambda_schedule", "init.resonator", "init.probe", "observables", "outputs.dir",
        "ensemble.size", "ensemble.workers", "analysis.histogram_observable", "analysis.bin_width",
        "analysis.peak_band", "analysis.hysteresis", "analysis.min_dwell_steps"};
    return keys;
}

}  // namespace

std::vector<std::string> RunConfig::recorded_observables() const {
    std::vector<std::string> out;
    auto add = [&](const std::string& name) {
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    };
    for (const auto& c : observables) add(base_observable(c));
    add(analysis.histogram_observable);
    return out;
}

void RunConfig::validate() const {
    integrator.validate();
    if (ensemble_size < 1) throw Error(ErrorCode::InvalidConfig, "ensemble_size must be ≥ 1");
    const ModelSystem sys = build_model(model);
    for (const auto& name : recorded_observables()) {
        if (!sys.observables.count(name)) {
            throw Error(ErrorCode::MissingObservable, name + " is not defined for " + to_string(model.scenario));
        }
    }
    (void)build_initial_state(*this);
}

KeyValueConfig to_key_values(const RunConfig& c) {
    KeyValueConfig kv;
    kv.set_int("format_version", kConfigFormatVersion);
    kv.set("name", c.name);
    kv.set("model.scenario", std::string(to_string(c.model.scenario)));
    kv.set("model.frame", std::string(to_string(c.model.frame)));
    kv.set("model.lambda", c.model.lambda);
    kv.set("model.k", c.model.k);
    kv.set("model.omega_R", c.model.omega_R);
    kv.set("model.E_J_over_hbar", c.model.E_J_over_hbar);
    kv.set("model.delta", c.model.delta ? format_real(*c.model.delta) : std::string("auto"));
    kv.set("model.Gamma", c.model.Gamma);
    kv.set("model.T", c.model.T);
    kv.set("model.gamma_CPB", c.model.gamma_CPB);
    kv.set("model.dims", dims_to_string(c.model.dims));
    kv.set("integrator.dt", c.integrator.dt);
    kv.set("integrator.t_final", c.integrator.t_final);
    kv.set("integrator.seed", std::to_string(c.integrator.seed));
    kv.set("integrator.method", std::string(to_string(c.integrator.method)));
    kv.set("integrator.unraveling", std::string(to_string(c.integrator.unraveling)));
    kv.set_int("integrator.snapshot_stride", c.integrator.snapshot_stride);
    kv.set("integrator.lambda_schedule", schedule_to_string(c.integrator.lambda_schedule));
    kv.set("init.resonator", c.init_resonator.to_string());
    kv.set("init.probe", c.init_probe.to_string());
    kv.set("observables", join(c.observables, ","));
    kv.set("outputs.dir", c.outputs.string());
    kv.set_int("ensemble.size", static_cast<std::int64_t>(c.ensemble_size));
    kv.set_int("ensemble.workers", c.workers);
    kv.set("analysis.histogram_observable", c.analysis.histogram_observable);
    kv.set("analysis.bin_width", c.analysis.bin_width);
    kv.set("analysis.peak_band", c.analysis.peak_band);
    kv.set("analysis.hysteresis", c.analysis.hysteresis);
    kv.set_int("analysis.min_dwell_steps", c.analysis.min_dwell_steps);
    return kv;
}

RunConfig run_config_from(const KeyValueConfig& kv) {
    for (const auto& [k, v] : kv.entries()) {
        if (!known_keys().count(k)) throw Error(ErrorCode::ParseError, "unknown key '" + k + "'");
    }
    const auto version = kv.get_int("format_version", -1);
    if (version != kConfigFormatVersion) {
        throw Error(ErrorCode::ParseError, "format_version must be " + std::to_string(kConfigFormatVersion));
    }
    auto angular = [&](const std::string& key, const std::string& hz_key, double fallback) {
        if (kv.has(key) && kv.has(hz_key)) throw Error(ErrorCode::ParseError, "both " + key + " and " + hz_key);
        if (kv.has(hz_key)) return 2.0 * constants::pi * kv.get_double(hz_key);
        return kv.get_double(key, fallback);
    };

    RunConfig c;
    c.name = kv.get("name", c.name);
    ModelSpec& m = c.model;
    m.scenario = parse_scenario(kv.get("model.scenario"));
    m.frame = parse_frame(kv.get("model.frame", m.scenario == Scenario::TlsProbe ? "Lab" : "Rwa"));
    m.lambda = kv.get_double("model.lambda", 0.0);
    m.k = kv.get_double("model.k", 1.0);
    m.omega_R = angular("model.omega_R", "model.f_R_hz", 0.0);
    m.E_J_over_hbar = angular("model.E_J_over_hbar", "model.f_J_hz", 0.0);
    const std::string delta = kv.get("model.delta", "auto");
    if (delta != "auto") m.delta = parse_real(delta, "model.delta");
    m.Gamma = kv.get_double("model.Gamma", 0.0);
    m.T = kv.get_double("model.T", 0.0);
    m.gamma_CPB = kv.get_double("model.gamma_CPB", 0.0);
    m.dims = parse_dims(kv.get("model.dims"));

    IntegratorConfig& ic = c.integrator;
    ic.dt = kv.get_double("integrator.dt");
    ic.t_final = kv.get_double("integrator.t_final");
    ic.seed = kv.get_uint("integrator.seed", ic.seed);
    ic.method = parse_method(kv.get("integrator.method", to_string(ic.method)));
    ic.unraveling = parse_unraveling(kv.get("integrator.unraveling", to_string(ic.unraveling)));
    ic.snapshot_stride = static_cast<int>(kv.get_int("integrator.snapshot_stride", 1));
    ic.lambda_schedule = parse_schedule(kv.get("integrator.lambda_schedule", ""));

    c.init_resonator = SubsystemInit::parse(kv.get("init.resonator", c.init_resonator.to_string()));
    c.init_probe = SubsystemInit::parse(kv.get("init.probe", c.init_probe.to_string()));
    c.observables = split(kv.get("observables", "N_R"), ',');
    c.outputs = kv.get("outputs.dir", default_output_dir().string());
    const auto ens = kv.get_int("ensemble.size", 1);
    if (ens < 1) throw Error(ErrorCode::ParseError, "ensemble.size must be ≥ 1");
    c.ensemble_size = static_cast<std::size_t>(ens);
    c.workers = static_cast<int>(kv.get_int("ensemble.workers", 0));
    c.analysis.histogram_observable = kv.get("analysis.histogram_observable", c.analysis.histogram_observable);
    c.analysis.bin_width = kv.get_double("analysis.bin_width", c.analysis.bin_width);
    c.analysis.peak_band = kv.get_double("analysis.peak_band", c.analysis.peak_band);
    c.analysis.hysteresis = kv.get_double("analysis.hysteresis", c.analysis.hysteresis);
    c.analysis.min_dwell_steps = static_cast<int>(kv.get_int("analysis.min_dwell_steps", c.analysis.min_dwell_steps));
    return c;
}

RunConfig load_run_config(const fs::path& path) { return run_config_from(KeyValueConfig::load(path)); }

void save_run_config(const RunConfig& cfg, const fs::path& path) { to_key_values(cfg).save(path); }

InitialState build_initial_state(const RunConfig& cfg) {
    const SpaceLayout& L = cfg.model.dims;
    const Index d_R = L.factor(SpaceLayout::kResonator);
    auto oscillator = [](const SubsystemInit& s, Index dim, const char* which) -> StateVector {
        switch (s.kind) {
            case SubsystemInit::Kind::Coherent: return coherent_state(dim, s.alpha);
            case SubsystemInit::Kind::Fock: return fock_state(dim, s.n);
            case SubsystemInit::Kind::Ground: return fock_state(dim, 0);
            case SubsystemInit::Kind::Excited: break;
        }
        throw Error(ErrorCode::InvalidConfig, std::string("'excited' is not defined for the ") + which);
    };
    const StateVector res = oscillator(cfg.init_resonator, d_R, "resonator");
    if (L.num_factors() == 1) return res;

    const Index d_P = L.factor(SpaceLayout::kProbe);
    StateVector probe;
    const auto kind = cfg.init_probe.kind;
    switch (cfg.model.scenario) {
        case Scenario::RwaOscillators:
            probe = oscillator(cfg.init_probe, d_P, "probe oscillator");
            break;
        case Scenario::TlsProbe:
            // +(ω_R/2)σ_z free term: ground is the σ_z = −1 state (index 1)
            if (kind == SubsystemInit::Kind::Ground) probe = fock_state(2, 1);
            else if (kind == SubsystemInit::Kind::Excited) probe = fock_state(2, 0);
            else if (kind == SubsystemInit::Kind::Fock) probe = fock_state(2, cfg.init_probe.n);
            else throw Error(ErrorCode::InvalidConfig, "a two-level probe cannot start coherent");
            break;
        case Scenario::CpbReduced:
            if (kind == SubsystemInit::Kind::Ground) probe = cpb_ground();
            else if (kind == SubsystemInit::Kind::Excited) probe = cpb_excited();
            else if (kind == SubsystemInit::Kind::Fock) probe = fock_state(2, cfg.init_probe.n);
            else throw Error(ErrorCode::InvalidConfig, "a two-level probe cannot start coherent");
            break;
    }
    return kron(res, probe);
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("QZENO_OUT"); env && *env) return env;
    return "qzeno_out";
}

// ---------------------------------------------------------------------------
// Presets

RunConfig preset_fig1() {
    RunConfig c;
    c.name = "fig1";
    c.model.scenario = Scenario::RwaOscillators;
    c.model.frame = Frame::Rwa;
    c.model.k = 1.0;
    c.model.lambda = 0.05;
    c.model.omega_R = 2.0 * constants::pi * 1e8;
    c.model.dims = SpaceLayout{15, 15};
    c.integrator.dt = 1e-3;
    c.integrator.t_final = 200.0;
    c.integrator.seed = 1;
    c.integrator.method = Method::HeunDriftEulerNoise;
    c.integrator.unraveling = Unraveling::Sse;
    c.integrator.snapshot_stride = 10;
    c.integrator.lambda_schedule = {{0.0, 0.05}, {50.0, 7.5e-3}};
    c.init_resonator = SubsystemInit::coherent({std::sqrt(2.0), 0.0});
    c.init_probe = SubsystemInit::coherent({std::sqrt(2.0), 0.0});
    c.observables = {"N_R", "N_P", "Var(N_R)", "Var(N_P)"};
    c.outputs = default_output_dir() / "fig1";
    return c;
}

RunConfig preset_fig2(char which) {
    if (which != 'a' && which != 'b' && which != 'c') {
        throw Error(ErrorCode::InvalidCase, std::string("fig2 case must be a, b or c, got '") + which + "'");
    }
    using constants::pi;
    RunConfig c;
    c.name = std::string("fig2") + which;
    ModelSpec& m = c.model;
    m.scenario = Scenario::CpbReduced;
    m.frame = Frame::Rwa;
    m.omega_R = 2.0 * pi * 1e8;
    m.k = m.omega_R / 20.0;
    m.lambda = 0.75 * m.k;
    // ω_S/2π = 10 GHz detuned by Δ = 4π×10⁸ s⁻¹
    m.E_J_over_hbar = 2.0 * pi * 10e9 + 4.0 * pi * 1e8;
    switch (which) {
        case 'a':
            m.Gamma = 0.0;
            m.T = 0.0;
            m.gamma_CPB = 0.0;
            m.dims = SpaceLayout{20, 2};
            break;
        case 'b':
            m.Gamma = m.k / 500.0;
            m.T = 6e-3;
            m.gamma_CPB = 1e6;
            m.dims = SpaceLayout{20, 2};
            break;
        case 'c':
            m.Gamma = m.k / 2500.0;
            m.T = 32e-3;
            m.gamma_CPB = 1e6;
            m.dims = SpaceLayout{30, 2};
            break;
    }
    c.integrator.dt = 1e-3 / m.k;
    c.integrator.t_final = 2000.0 / m.k;
    c.integrator.seed = 1;
    c.integrator.method = Method::HeunDriftEulerNoise;
    c.integrator.unraveling = Unraveling::Sme;
    c.integrator.snapshot_stride = 10;
    c.init_resonator = SubsystemInit::coherent({std::sqrt(2.0), 0.0});
    c.init_probe = SubsystemInit::ground();
    c.observables = {"N_R", "Var(N_R)", "sigma_x"};
    c.outputs = default_output_dir() / c.name;
    return c;
}

RunConfig preset_by_name(const std::string& name) {
    if (name == "fig1") return preset_fig1();
    if (name.size() == 5 && name.rfind("fig2", 0) == 0) return preset_fig2(name[4]);
    throw Error(ErrorCode::InvalidCase, "unknown preset '" + name + "' (fig1, fig2a, fig2b, fig2c)");
}

// ---------------------------------------------------------------------------
// Output files

std::string sha256_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + file.string() + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

namespace {

struct SeriesTable {
    std::vector<double> times;
    std::vector<std::pair<std::string, std::vector<double>>> columns;
};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

std::string csv_of(const SeriesTable& t) {
    std::ostringstream out;
    out << 't';
    for (const auto& [name, _] : t.columns) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        out << format_real(t.times[i]);
        for (const auto& [_, col] : t.columns) out << ',' << format_real(col[i]);
        out << '\n';
    }
    return out.str();
}

json events_json(const std::vector<JumpEvent>& events) {
    json arr = json::array();
    for (const auto& e : events) arr.push_back({{"t", e.t}, {"from", e.from_level}, {"to", e.to_level}});
    return arr;
}

json histogram_json(const HistogramResult& h, const RunConfig& cfg, double sample_dt) {
    return {{"observable", cfg.analysis.histogram_observable},
            {"bin_width", cfg.analysis.bin_width},
            {"peak_band", h.band},
            {"sample_dt", sample_dt},
            {"total_weight", h.total_weight()},
            {"peak_score", h.peak_score},
            {"peak_score_le_2", integer_peak_score(h, -INFINITY, 2.0, h.band)},
            {"peak_score_gt_4", integer_peak_score(h, 4.0, INFINITY, h.band)},
            {"bin_edges", h.bin_edges},
            {"weights", h.weights}};
}

}  // namespace

RunManifest run_config(const RunConfig& cfg_in) {
    const fs::path dir = cfg_in.outputs;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) {
        throw Error(ErrorCode::IoError, "output directory '" + dir.string() + "' does not exist");
    }
    cfg_in.validate();
    RunConfig cfg = cfg_in;
    cfg.integrator.keep_partial_on_failure = true;

    const auto t0 = std::chrono::steady_clock::now();
    const InitialState init = build_initial_state(cfg);
    const auto recorded = cfg.recorded_observables();

    std::vector<TrajectoryResult> runs;
    SeriesTable table;
    double max_leakage = 0.0;
    double max_trace_drift = 0.0;
    double max_herm = 0.0;
    bool failed = false;
    std::string failure;
    if (cfg.ensemble_size == 1) {
        runs.push_back(run_trajectory(cfg.model, init, cfg.integrator, recorded, 0));
    } else {
        EnsembleOptions opts{cfg.ensemble_size, cfg.workers, true};
        EnsembleResult ens = run_ensemble(
            [&](std::uint64_t i) { return run_trajectory(cfg.model, init, cfg.integrator, recorded, i); }, opts);
        runs = std::move(ens.trajectories);
    }
    for (const auto& r : runs) {
        max_leakage = std::max(max_leakage, r.max_leakage);
        max_trace_drift = std::max(max_trace_drift, r.max_trace_drift);
        max_herm = std::max(max_herm, r.max_hermiticity_error);
        if (r.failed && !failed) {
            failed = true;
            failure = r.failure;
        }
    }

    // Series: the single trajectory, or the ensemble mean (plus spread) over
    // the common prefix of all trajectories.
    std::size_t n_t = runs.front().times.size();
    for (const auto& r : runs) n_t = std::min(n_t, r.times.size());
    auto truncated = [n_t](const std::vector<double>& v) { return std::vector<double>(v.begin(), v.begin() + n_t); };
    std::vector<TrajectoryResult> trimmed;
    for (const auto& r : runs) {
        TrajectoryResult t;
        t.times = truncated(r.times);
        t.record = truncated(r.record);
        t.trajectory_index = r.trajectory_index;
        t.max_leakage = r.max_leakage;
        for (const auto& [k, v] : r.exp_series) t.exp_series[k] = truncated(v);
        for (const auto& [k, v] : r.var_series) t.var_series[k] = truncated(v);
        trimmed.push_back(std::move(t));
    }
    const EnsembleResult agg = reduce_trajectories(trimmed, false);
    table.times = agg.times;
    for (const auto& col : cfg.observables) {
        const std::string base = base_observable(col);
        table.columns.emplace_back(col, base == col ? agg.mean.at(base) : agg.mean_variance.at(base));
        if (cfg.ensemble_size > 1 && base == col) table.columns.emplace_back("std(" + col + ")", agg.stddev.at(base));
    }
    table.columns.emplace_back("dr", agg.mean_record);

    const double sample_dt = cfg.integrator.dt * cfg.integrator.snapshot_stride;
    std::vector<std::vector<double>> hist_series;
    for (const auto& r : trimmed) hist_series.push_back(r.exp_series.at(cfg.analysis.histogram_observable));
    const HistogramResult hist =
        histogram_of_series(hist_series, sample_dt, cfg.analysis.bin_width, cfg.analysis.peak_band);

    const double min_dwell = cfg.analysis.min_dwell_steps * cfg.integrator.dt;
    json jumps = {{"hysteresis", cfg.analysis.hysteresis}, {"min_dwell", min_dwell}, {"trajectories", json::array()}};
    for (const auto& r : trimmed) {
        json per = {{"index", r.trajectory_index}, {"events", json::object()}};
        for (const char* name : {"N_R", "N_P"}) {
            auto it = r.exp_series.find(name);
            if (it == r.exp_series.end()) continue;
            per["events"][name] = events_json(detect_jumps(it->second, r.times, cfg.analysis.hysteresis, min_dwell));
        }
        jumps["trajectories"].push_back(std::move(per));
    }

    write_file(dir / "timeseries.csv", csv_of(table));
    write_file(dir / "histogram.json", histogram_json(hist, cfg, sample_dt).dump(2) + "\n");
    write_file(dir / "jumps.json", jumps.dump(2) + "\n");

    RunManifest man;
    man.failed = failed;
    man.leakage_exceeded = max_leakage >= kLeakageLimit;
    for (const char* f : {"timeseries.csv", "histogram.json", "jumps.json"}) man.checksums[f] = sha256_hex(dir / f);

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json config_echo = json::object();
    const KeyValueConfig echoed = to_key_values(cfg_in);
    for (const auto& [k, v] : echoed.entries()) config_echo[k] = v;
    man.json = {{"format_version", kConfigFormatVersion},
                {"code_version", kCodeVersion},
                {"name", cfg.name},
                {"seed", cfg.integrator.seed},
                {"ensemble_size", cfg.ensemble_size},
                {"initial_state", {{"resonator", cfg.init_resonator.to_string()}, {"probe", cfg.init_probe.to_string()}}},
                {"max_leakage", max_leakage},
                {"leakage_exceeded", man.leakage_exceeded},
                {"max_trace_drift", max_trace_drift},
                {"max_hermiticity_error", max_herm},
                {"status", failed ? "failed" : "ok"},
                {"failure", failure},
                {"analysis",
                 {{"bin_width", cfg.analysis.bin_width},
                  {"peak_band", cfg.analysis.peak_band},
                  {"hysteresis", cfg.analysis.hysteresis},
                  {"min_dwell", min_dwell}}},
                {"files", man.checksums},
                {"config", config_echo},
                {"wall_time_s", wall}};
    write_file(dir / "manifest.json", man.json.dump(2) + "\n");
    return man;
}

}  // namespace qzeno
