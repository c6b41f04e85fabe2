#include "slc/noise.hpp"
#include "slc/errors.hpp"

#include <cmath>
#include <numbers>

namespace slc {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k)
{
    constexpr std::uint64_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = m0 * c[0];
        std::uint64_t p1 = m1 * c[2];
        std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += w0;
        k[1] += w1;
    }
    return c;
}

double keyed_normal(std::uint64_t seed, std::uint32_t trajectory, std::uint32_t step, std::uint32_t coordinate,
                    std::uint32_t stream)
{
    auto r = philox4x32({coordinate, step, trajectory, stream},
                        {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    std::uint64_t a = (std::uint64_t(r[0]) << 32 | r[1]) >> 11;
    std::uint64_t b = (std::uint64_t(r[2]) << 32 | r[3]) >> 11;
    double u1 = (static_cast<double>(a) + 1.0) * 0x1p-53; // (0, 1]
    double u2 = static_cast<double>(b) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint32_t stream_tag(int level, bool w2) { return static_cast<std::uint32_t>(level) << 1 | (w2 ? 1u : 0u); }

std::int64_t to_ticks(double x) { return std::llround(x / kIncrementQuantum); }

} // namespace

double BrownianPath::dt() const { return std::ldexp(dt_base, -refinement_level); }

double BrownianPath::w1(std::size_t step, int j) const
{
    return static_cast<double>(w1_ticks[step * mode_count + j]) * kIncrementQuantum;
}

double BrownianPath::w2(std::size_t step) const { return static_cast<double>(w2_ticks[step]) * kIncrementQuantum; }

std::vector<double> BrownianPath::w1_increment(std::size_t step) const
{
    std::vector<double> out(mode_count);
    for (int j = 0; j < mode_count; ++j)
        out[j] = w1(step, j);
    return out;
}

BrownianPath sample_path(std::uint64_t seed, double horizon, double dt_base, int mode_count, std::uint32_t trajectory)
{
    if (mode_count <= 0)
        throw ConfigError("mode_count must be positive");
    if (!(dt_base > 0.0))
        throw ConfigError("dt must be positive");
    if (!(horizon >= 0.0))
        throw ConfigError("horizon must be nonnegative");
    double ratio = horizon / dt_base;
    long long steps = std::llround(ratio);
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("horizon must be an integer multiple of dt");

    BrownianPath p;
    p.seed = seed;
    p.trajectory = trajectory;
    p.dt_base = dt_base;
    p.mode_count = mode_count;
    p.steps = static_cast<std::size_t>(steps);
    p.w1_ticks.resize(p.steps * mode_count);
    p.w2_ticks.resize(p.steps);
    const double sd = std::sqrt(dt_base);
    for (std::size_t n = 0; n < p.steps; ++n) {
        auto step = static_cast<std::uint32_t>(n);
        for (int j = 0; j < mode_count; ++j)
            p.w1_ticks[n * mode_count + j] =
                to_ticks(sd * keyed_normal(seed, trajectory, step, static_cast<std::uint32_t>(j), stream_tag(0, false)));
        p.w2_ticks[n] = to_ticks(sd * keyed_normal(seed, trajectory, step, 0, stream_tag(0, true)));
    }
    return p;
}

BrownianPath refine(const BrownianPath& coarse)
{
    BrownianPath p = coarse;
    p.refinement_level = coarse.refinement_level + 1;
    p.steps = coarse.steps * 2;
    p.w1_ticks.assign(p.steps * p.mode_count, 0);
    p.w2_ticks.assign(p.steps, 0);
    const double half_sd = 0.5 * std::sqrt(coarse.dt());
    const int level = p.refinement_level;
    auto split = [&](std::int64_t total, std::uint32_t step, std::uint32_t coord, bool w2) {
        double mid = 0.5 * static_cast<double>(total) * kIncrementQuantum +
                     half_sd * keyed_normal(p.seed, p.trajectory, step, coord, stream_tag(level, w2));
        std::int64_t first = to_ticks(mid);
        return std::pair<std::int64_t, std::int64_t>{first, total - first};
    };
    for (std::size_t n = 0; n < coarse.steps; ++n) {
        auto step = static_cast<std::uint32_t>(n);
        for (int j = 0; j < p.mode_count; ++j) {
            auto [a, b] = split(coarse.w1_ticks[n * p.mode_count + j], step, static_cast<std::uint32_t>(j), false);
            p.w1_ticks[2 * n * p.mode_count + j] = a;
            p.w1_ticks[(2 * n + 1) * p.mode_count + j] = b;
        }
        auto [a, b] = split(coarse.w2_ticks[n], step, 0, true);
        p.w2_ticks[2 * n] = a;
        p.w2_ticks[2 * n + 1] = b;
    }
    return p;
}

BrownianPath refine(const BrownianPath& path, int levels)
{
    BrownianPath p = path;
    for (int l = 0; l < levels; ++l)
        p = refine(p);
    return p;
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index)
{
    auto r = philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x5eedu, 0u},
                        {static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32)});
    return std::uint64_t(r[0]) << 32 | r[1];
}

} // namespace slc
