#include <doctest.h>

#include "qzeno/observables.hpp"

using namespace qzeno;

namespace {

std::vector<double> steps_series(const std::vector<std::pair<double, int>>& plateaus, double dt,
                                 std::vector<double>& times) {
    std::vector<double> s;
    times.clear();
    double t = 0.0;
    for (const auto& [len, level] : plateaus) {
        const auto n = static_cast<int>(std::lround(len / dt));
        for (int i = 0; i < n; ++i) {
            s.push_back(level);
            times.push_back(t);
            t += dt;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("histogram weights and range") {
    const std::vector<double> s = {1.0, 1.02, 1.5, 2.0, 2.0};
    const auto h = histogram_of_series(s, 0.1, 0.05, 0.2);
    CHECK(h.bin_edges.front() == doctest::Approx(0.5));
    CHECK(h.bin_edges.back() == doctest::Approx(2.5));
    CHECK(h.weights.size() + 1 == h.bin_edges.size());
    CHECK(h.total_weight() == doctest::Approx(0.4));
    // 1.5 is the only sample outside the integer bands; it carries dt of the 0.4 total.
    CHECK(h.peak_score == doctest::Approx(0.75));
    CHECK(integer_peak_score(h, 1.7, 3.0) == doctest::Approx(1.0));
    CHECK(integer_peak_score(h, 1.2, 1.7) == doctest::Approx(0.0));
    CHECK(integer_peak_score(h, 5.0, 6.0) == 0.0);
}

TEST_CASE("histogram of a constant series") {
    const auto h = histogram_of_series(std::vector<double>(10, 3.0), 0.5);
    CHECK(h.peak_score == 1.0);
    CHECK(h.total_weight() == doctest::Approx(4.5));
    const auto pooled = histogram_of_series({std::vector<double>(3, 0.0), std::vector<double>(3, 2.0)}, 1.0);
    CHECK(pooled.total_weight() == doctest::Approx(4.0));
    CHECK(pooled.bin_edges.front() == doctest::Approx(-0.5));
    CHECK_THROWS_AS(histogram_of_series(std::vector<double>{}, 0.1), Error);
    CHECK_THROWS_AS(histogram_of_series(std::vector<double>{1.0}, 0.1, 0.0), Error);
}

TEST_CASE("jump detection") {
    std::vector<double> t;
    auto s = steps_series({{1.0, 2}, {1.0, 1}, {1.0, 2}, {1.0, 3}}, 0.01, t);
    auto ev = detect_jumps(s, t, 0.3, 0.1);
    REQUIRE(ev.size() == 3);
    CHECK(ev[0] == JumpEvent{t[100], 2, 1});
    CHECK(ev[1].from_level == 1);
    CHECK(ev[2].to_level == 3);
    CHECK(jump_rate(ev, 4.0) == doctest::Approx(0.75));
    CHECK(jump_rate(ev, 1.5, 1.5) == doctest::Approx(2.0 / 1.5));

    // Excursions shorter than the dwell time, or never entering a band, are ignored.
    auto blip = steps_series({{1.0, 2}, {0.05, 1}, {1.0, 2}}, 0.01, t);
    CHECK(detect_jumps(blip, t, 0.3, 0.1).empty());
    std::vector<double> half(t.size(), 2.5);
    CHECK(detect_jumps(half, t, 0.3, 0.1).empty());
    CHECK_THROWS_AS(detect_jumps(s, std::vector<double>(3), 0.3, 0.1), Error);
    CHECK_THROWS_AS(detect_jumps(s, t, 0.6, 0.1), Error);
}

TEST_CASE("jump pairing") {
    const std::vector<JumpEvent> a = {{1.0, 2, 1}, {2.0, 1, 2}, {3.0, 2, 3}};
    const std::vector<JumpEvent> b = {{1.01, 0, 1}, {2.02, 1, 0}, {3.5, 0, 1}};
    const auto p = pair_jumps(a, b, 0.05);
    CHECK(p.pairs == 2);
    CHECK(p.opposite == 2);
    CHECK(p.unmatched == 1);
    CHECK(p.opposite_fraction() == 1.0);
    const auto q = pair_jumps(a, {{1.0, 0, 1}, {1.01, 1, 2}}, 0.05);
    CHECK(q.pairs == 1);
    CHECK(JumpPairing{}.opposite_fraction() == 0.0);
}

TEST_CASE("variance series lookup") {
    TrajectoryResult r;
    r.var_series["N_R"] = {2.0, 1.0};
    CHECK(variance_series(r, "N_R").back() == 1.0);
    CHECK_THROWS_AS(variance_series(r, "N_P"), Error);
}
