#include "qzeno/ensemble.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include <omp.h>

namespace qzeno {

namespace {

void raise_failures(const std::vector<std::string>& errors) {
    std::ostringstream msg;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i].empty()) continue;
        if (failed++ < 8) msg << "\n  trajectory " << i << ": " << errors[i];
    }
    if (failed > 0) {
        throw Error(ErrorCode::TrajectoryFailed, std::to_string(failed) + " trajectories failed" + msg.str());
    }
}

std::string describe(const std::exception_ptr& p) {
    try {
        std::rethrow_exception(p);
    } catch (const std::exception& e) {
        return e.what();
    } catch (...) {
        return "unknown exception";
    }
}

void require_trajectories(const EnsembleOptions& opts) {
    if (opts.trajectories < 1) throw Error(ErrorCode::InvalidConfig, "ensemble needs M ≥ 1");
}

}  // namespace

EnsembleResult reduce_trajectories(std::vector<TrajectoryResult> runs, bool keep) {
    EnsembleResult out;
    if (runs.empty()) return out;
    const std::size_t m = runs.size();
    const TrajectoryResult& first = runs.front();
    out.times = first.times;
    const std::size_t n_t = out.times.size();

    for (const auto& [name, series] : first.exp_series) {
        std::vector<double> mean(n_t, 0.0), sd(n_t, 0.0), var(n_t, 0.0);
        for (const auto& r : runs) {
            const auto& s = r.exp_series.at(name);
            const auto& v = r.var_series.at(name);
            for (std::size_t i = 0; i < n_t; ++i) {
                mean[i] += s[i];
                var[i] += v[i];
            }
        }
        for (std::size_t i = 0; i < n_t; ++i) {
            mean[i] /= static_cast<double>(m);
            var[i] /= static_cast<double>(m);
        }
        if (m > 1) {
            for (const auto& r : runs) {
                const auto& s = r.exp_series.at(name);
                for (std::size_t i = 0; i < n_t; ++i) sd[i] += (s[i] - mean[i]) * (s[i] - mean[i]);
            }
            for (std::size_t i = 0; i < n_t; ++i) sd[i] = std::sqrt(sd[i] / static_cast<double>(m - 1));
        }
        out.mean[name] = std::move(mean);
        out.stddev[name] = std::move(sd);
        out.mean_variance[name] = std::move(var);
    }
    out.mean_record.assign(n_t, 0.0);
    for (const auto& r : runs) {
        for (std::size_t i = 0; i < n_t; ++i) out.mean_record[i] += r.record[i];
        out.max_leakage = std::max(out.max_leakage, r.max_leakage);
        TrajectorySummary s;
        s.index = r.trajectory_index;
        s.max_leakage = r.max_leakage;
        for (const auto& [name, series] : r.exp_series) s.final_values[name] = series.back();
        out.summaries.push_back(std::move(s));
    }
    for (auto& v : out.mean_record) v /= static_cast<double>(m);
    if (keep) out.trajectories = std::move(runs);
    return out;
}

EnsembleResult run_ensemble(const TrajectoryFn& fn, const EnsembleOptions& opts) {
    require_trajectories(opts);
    const auto m = static_cast<std::int64_t>(opts.trajectories);
    std::vector<TrajectoryResult> runs(opts.trajectories);
    std::vector<std::string> errors(opts.trajectories);
    const int workers = opts.workers > 0 ? opts.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
    for (std::int64_t i = 0; i < m; ++i) {
        try {
            runs[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = describe(std::current_exception());
        }
    }
    raise_failures(errors);
    return reduce_trajectories(std::move(runs), opts.keep_trajectories);
}

EnsembleResult run_ensemble_serial(const TrajectoryFn& fn, const EnsembleOptions& opts) {
    require_trajectories(opts);
    std::vector<TrajectoryResult> runs(opts.trajectories);
    std::vector<std::string> errors(opts.trajectories);
    for (std::size_t i = 0; i < opts.trajectories; ++i) {
        try {
            runs[i] = fn(i);
        } catch (...) {
            errors[i] = describe(std::current_exception());
        }
    }
    raise_failures(errors);
    return reduce_trajectories(std::move(runs), opts.keep_trajectories);
}

EnsembleResult run_ensemble(const ModelSpec& model, const InitialState& init, const IntegratorConfig& cfg,
                            const std::vector<std::string>& observables, const EnsembleOptions& opts) {
    return run_ensemble(
        [&](std::uint64_t i) { return run_trajectory(model, init, cfg, observables, i); }, opts);
}

EnsembleResult run_ensemble(const ModelSystem& system, const InitialState& init, const IntegratorConfig& cfg,
                            const std::vector<std::string>& observables, const EnsembleOptions& opts) {
    return run_ensemble(
        [&](std::uint64_t i) { return run_trajectory(system, init, cfg, observables, i); }, opts);
}

}  // namespace qzeno
