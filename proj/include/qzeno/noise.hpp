#pragma once

#include <array>
#include <cstdint>

namespace qzeno {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based Gaussian stream: every increment is a pure function of
/// (seed, trajectory, step), so draws are independent of evaluation order.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint64_t trajectory) : seed_(seed), trajectory_(trajectory) {}

    /// Standard normal draw for `step`.
    double normal(std::uint64_t step) const;
    /// Wiener increment with variance dt.
    double increment(std::uint64_t step, double dt) const;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t trajectory() const noexcept { return trajectory_; }

private:
    std::uint64_t seed_;
    std::uint64_t trajectory_;
};

}  // namespace qzeno
