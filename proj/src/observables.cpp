#include "qzeno/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace qzeno {

double HistogramResult::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

HistogramResult histogram_of_series(const std::vector<std::vector<double>>& all, double dt,
                                    double bin_width, double band) {
    if (!(bin_width > 0.0)) throw Error(ErrorCode::NonpositiveInput, "bin_width must be > 0");
    double mn = INFINITY;
    double mx = -INFINITY;
    for (const auto& s : all) {
        for (double v : s) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    if (!(mn <= mx)) throw Error(ErrorCode::EmptySeries, "histogram of an empty series");
    const double lo = std::round(mn) - 0.5;
    const double hi = std::round(mx) + 0.5;
    const auto nbins = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / bin_width - 1e-9)));

    HistogramResult h;
    h.band = band;
    h.bin_edges.resize(nbins + 1);
    for (std::size_t j = 0; j <= nbins; ++j) h.bin_edges[j] = lo + static_cast<double>(j) * bin_width;
    h.weights.assign(nbins, 0.0);

    for (const auto& series : all) {
        const std::size_t n = series.size();
        for (std::size_t i = 0; i < n; ++i) {
            // trapezoid weights: the series covers (n − 1)·dt of elapsed time
            const double w = (n > 1 && (i == 0 || i == n - 1)) ? 0.5 * dt : dt;
            const double pos = std::floor((series[i] - lo) / bin_width);
            const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(nbins - 1)));
            h.weights[bin] += w;
        }
    }
    h.peak_score = integer_peak_score(h, band);
    return h;
}

HistogramResult histogram_of_series(const std::vector<double>& series, double dt, double bin_width, double band) {
    if (series.empty()) throw Error(ErrorCode::EmptySeries, "histogram of an empty series");
    return histogram_of_series(std::vector<std::vector<double>>{series}, dt, bin_width, band);
}

double integer_peak_score(const HistogramResult& hist, double band) {
    return integer_peak_score(hist, -INFINITY, INFINITY, band);
}

double integer_peak_score(const HistogramResult& hist, double lo, double hi, double band) {
    double in_band = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < hist.weights.size(); ++i) {
        const double c = hist.bin_center(i);
        if (!(c > lo && c <= hi)) continue;
        total += hist.weights[i];
        if (std::abs(c - std::round(c)) < band) in_band += hist.weights[i];
    }
    return total > 0.0 ? in_band / total : 0.0;
}

std::vector<JumpEvent> detect_jumps(const std::vector<double>& series, const std::vector<double>& times,
                                    double hysteresis, double min_dwell) {
    if (series.size() != times.size()) throw Error(ErrorCode::DimensionMismatch, "series vs times length");
    if (!(hysteresis > 0.0 && hysteresis < 0.5)) {
        throw Error(ErrorCode::InvalidConfig, "hysteresis must lie in (0, 0.5)");
    }
    std::vector<JumpEvent> events;
    std::optional<int> current;
    bool has_candidate = false;
    int candidate = 0;
    std::size_t cand_start = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double v = series[i];
        const int level = static_cast<int>(std::lround(v));
        if (std::abs(v - level) > hysteresis || (current && level == *current)) {
            has_candidate = false;
            continue;
        }
        if (!has_candidate || candidate != level) {
            has_candidate = true;
            candidate = level;
            cand_start = i;
        }
        if (times[i] - times[cand_start] >= min_dwell) {
            if (current) events.push_back({times[cand_start], *current, level});
            current = level;
            has_candidate = false;
        }
    }
    return events;
}

double jump_rate(const std::vector<JumpEvent>& events, double t_window, double t_start) {
    if (!(t_window > 0.0)) throw Error(ErrorCode::NonpositiveInput, "t_window must be > 0");
    const auto count = std::count_if(events.begin(), events.end(), [&](const JumpEvent& e) {
        return e.t >= t_start && e.t < t_start + t_window;
    });
    return static_cast<double>(count) / t_window;
}

const std::vector<double>& variance_series(const TrajectoryResult& traj, const std::string& op_name) {
    auto it = traj.var_series.find(op_name);
    if (it == traj.var_series.end()) throw Error(ErrorCode::MissingObservable, op_name);
    return it->second;
}

JumpPairing pair_jumps(const std::vector<JumpEvent>& a, const std::vector<JumpEvent>& b, double window) {
    JumpPairing p;
    std::vector<bool> used(b.size(), false);
    for (const auto& ea : a) {
        std::optional<std::size_t> best;
        double best_gap = window;
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double gap = std::abs(b[j].t - ea.t);
            if (!used[j] && gap <= best_gap) {
                best = j;
                best_gap = gap;
            }
        }
        if (!best) {
            ++p.unmatched;
            continue;
        }
        used[*best] = true;
        ++p.pairs;
        if (ea.to_level - ea.from_level == -(b[*best].to_level - b[*best].from_level)) ++p.opposite;
    }
    return p;
}

}  // namespace qzeno
