#pragma once

// Hand-rolled generators and small helpers shared by the unit suites.

#include "slc/fields.hpp"
#include "slc/grid.hpp"

#include <cmath>
#include <cstdint>

namespace slc::test {

/// splitmix64: tiny, deterministic, good enough for property inputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform on [lo, hi).
    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1p-53;
    }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t state_;
};

inline Array3 random_array(Shape s, Rng& rng)
{
    Array3 a(s);
    for (auto& v : a.values())
        v = rng.uniform();
    return a;
}

inline Grid unit_square(int n) { return build_grid(2, {n, n, 1}, {1.0, 1.0, 0.0}); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace slc::test
