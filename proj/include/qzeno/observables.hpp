#pragma once

// Post-processing of recorded series: dt-weighted ⟨N⟩ histograms with an
// integer-peak score, hysteresis jump detection and jump rates.

#include <string>
#include <vector>

#include "qzeno/dynamics.hpp"

namespace qzeno {

inline constexpr double kDefaultBinWidth = 0.05;
inline constexpr double kDefaultPeakBand = 0.2;
inline constexpr double kDefaultHysteresis = 0.3;

struct HistogramResult {
    std::vector<double> bin_edges;  // size = weights.size() + 1
    std::vector<double> weights;    // time spent in each bin
    double peak_score = 0.0;
    double band = kDefaultPeakBand;

    double total_weight() const;
    double bin_center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

struct JumpEvent {
    double t = 0.0;
    int from_level = 0;
    int to_level = 0;
    bool operator==(const JumpEvent&) const = default;
};

/// Trapezoid-weighted occupation histogram of a uniformly sampled series.
/// The range spans [round(min) − 0.5, round(max) + 0.5].
HistogramResult histogram_of_series(const std::vector<double>& series, double dt,
                                    double bin_width = kDefaultBinWidth, double band = kDefaultPeakBand);

/// Pooled histogram of several series sharing one bin grid.
HistogramResult histogram_of_series(const std::vector<std::vector<double>>& series, double dt,
                                    double bin_width = kDefaultBinWidth, double band = kDefaultPeakBand);

/// Fraction of mass whose bin centre lies within ±band of an integer.
double integer_peak_score(const HistogramResult& hist, double band = kDefaultPeakBand);
/// Same, restricted to bins with centre in (lo, hi].
double integer_peak_score(const HistogramResult& hist, double lo, double hi, double band = kDefaultPeakBand);

std::vector<JumpEvent> detect_jumps(const std::vector<double>& series, const std::vector<double>& times,
                                    double hysteresis, double min_dwell);

/// Events per unit time in [t_start, t_start + t_window).
double jump_rate(const std::vector<JumpEvent>& events, double t_window, double t_start = 0.0);

/// Var(X)(tᵢ) from a trajectory; throws MissingObservable.
const std::vector<double>& variance_series(const TrajectoryResult& traj, const std::string& op_name);

struct JumpPairing {
    std::size_t pairs = 0;       // events in A matched with an event in B
    std::size_t opposite = 0;    // of those, Δa = −Δb
    std::size_t unmatched = 0;
    double opposite_fraction() const { return pairs ? static_cast<double>(opposite) / pairs : 0.0; }
};

/// Matches each event of `a` with the nearest event of `b` within `window`.
JumpPairing pair_jumps(const std::vector<JumpEvent>& a, const std::vector<JumpEvent>& b, double window);

}  // namespace qzeno
