#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace slc {

/// Philox4x32-10 counter-based generator: a pure function of (key, counter).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal draw keyed by (seed, trajectory, step, coordinate, stream).
double keyed_normal(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t step, std::uint32_t coordinate,
                    std::uint32_t stream);

/// Increments are stored as integer multiples of this quantum so that bridge
/// refinement is exact: fine pairs sum to the coarse increment bit for bit.
inline constexpr double kIncrementQuantum = 0x1p-40;

struct BrownianPath {
    std::uint64_t seed = 0;
    std::uint32_t trajectory = 0;
    double dt_base = 0.0;
    int mode_count = 0;
    int refinement_level = 0;
    std::size_t steps = 0;
    std::vector<std::int64_t> w1_ticks; ///< steps x mode_count, step-major
    std::vector<std::int64_t> w2_ticks; ///< steps

    double dt() const;
    double horizon() const { return dt() * static_cast<double>(steps); }
    double w1(std::size_t step, int j) const;
    double w2(std::size_t step) const;
    std::vector<double> w1_increment(std::size_t step) const;

    bool operator==(const BrownianPath& o) const = default;
};

/// Throws ConfigError for mode_count <= 0, nonpositive dt/horizon, or a horizon that is
/// not an integer number of steps.  horizon == 0 gives an empty path.
BrownianPath sample_path(std::uint64_t seed, double horizon, double dt_base, int mode_count,
                         std::uint32_t trajectory = 0);

/// Halves dt by Brownian-bridge midpoint sampling.
BrownianPath refine(const BrownianPath& path);
/// Applies refine `levels` times.
BrownianPath refine(const BrownianPath& path, int levels);

/// Seed of trajectory i in an ensemble.
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

} // namespace slc
