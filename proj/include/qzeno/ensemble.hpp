#pragma once

// Independent trajectories distributed over OpenMP threads. Trajectory i
// always draws from NoiseStream(seed, i) and results are reduced in index
// order, so the output is bit-identical for any worker count.

#include <map>
#include <string>
#include <vector>

#include "qzeno/dynamics.hpp"

namespace qzeno {

struct EnsembleOptions {
    std::size_t trajectories = 1;
    /// OpenMP thread count; 0 uses the runtime default.
    int workers = 0;
    bool keep_trajectories = false;
};

struct TrajectorySummary {
    std::uint64_t index = 0;
    double max_leakage = 0.0;
    std::map<std::string, double> final_values;
};

struct EnsembleResult {
    std::vector<double> times;
    std::map<std::string, std::vector<double>> mean;
    /// Sample standard deviation across trajectories (n − 1 denominator; 0 for M = 1).
    std::map<std::string, std::vector<double>> stddev;
    std::map<std::string, std::vector<double>> mean_variance;
    std::vector<double> mean_record;
    double max_leakage = 0.0;
    std::vector<TrajectorySummary> summaries;
    std::vector<TrajectoryResult> trajectories;  // filled when keep_trajectories
};

/// Runs one trajectory for index i; shared by both drivers.
using TrajectoryFn = std::function<TrajectoryResult(std::uint64_t index)>;

EnsembleResult run_ensemble(const TrajectoryFn& fn, const EnsembleOptions& opts);
/// Single-threaded reference driver with the same reduction.
EnsembleResult run_ensemble_serial(const TrajectoryFn& fn, const EnsembleOptions& opts);

EnsembleResult run_ensemble(const ModelSpec& model, const InitialState& init, const IntegratorConfig& cfg,
                            const std::vector<std::string>& observables, const EnsembleOptions& opts);
EnsembleResult run_ensemble(const ModelSystem& system, const InitialState& init, const IntegratorConfig& cfg,
                            const std::vector<std::string>& observables, const EnsembleOptions& opts);

/// Ordered reduction of finished trajectories.
EnsembleResult reduce_trajectories(std::vector<TrajectoryResult> runs, bool keep);

}  // namespace qzeno
