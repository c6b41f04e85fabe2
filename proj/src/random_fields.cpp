#include "slc/random_fields.hpp"
#include "slc/errors.hpp"
#include "slc/noise.hpp"

#include <cmath>
#include <numbers>

namespace slc {

namespace {

constexpr std::uint32_t kStream = 0x52464c44; // distinct from the Wiener streams

struct Mode {
    int p, q, r;
    double weight;
};

std::vector<Mode> modes(const Grid& g, const RandomFieldSpec& spec, int first)
{
    std::vector<Mode> out;
    const int rmax = g.n_dim() == 3 ? spec.max_mode : first;
    for (int p = first; p <= spec.max_mode; ++p)
        for (int q = first; q <= spec.max_mode; ++q)
            for (int r = first; r <= rmax; ++r)
                out.push_back({p, q, r, std::pow(1.0 + p * p + q * q + r * r, -spec.decay)});
    return out;
}

double coefficient(const RandomFieldSpec& spec, std::uint32_t component, std::uint32_t index)
{
    return keyed_normal(spec.seed, component, index, 0, kStream);
}

void check(const RandomFieldSpec& spec)
{
    if (spec.max_mode < 1)
        throw ConfigError("random field max_mode must be >= 1");
    if (!(spec.rms >= 0.0))
        throw ConfigError("random field rms must be nonnegative");
}

double rms_of(const Grid& g, double sum_sq) { return std::sqrt(sum_sq / g.measure()); }

} // namespace

DirectorField random_director(const Grid& g, const RandomFieldSpec& spec)
{
    check(spec);
    const double pi = std::numbers::pi;
    auto ms = modes(g, spec, 0);
    DirectorField d = DirectorField::zeros(g);
    const Shape s = g.cell_shape();
    for (int k = 0; k < 3; ++k) {
        for (std::size_t m = 0; m < ms.size(); ++m) {
            const double c = ms[m].weight * coefficient(spec, k, static_cast<std::uint32_t>(m));
            for (int kk = 0; kk < s[2]; ++kk)
                for (int j = 0; j < s[1]; ++j)
                    for (int i = 0; i < s[0]; ++i) {
                        double v = std::cos(ms[m].p * pi * g.center(0, i) / g.length(0)) *
                                   std::cos(ms[m].q * pi * g.center(1, j) / g.length(1));
                        if (g.n_dim() == 3)
                            v *= std::cos(ms[m].r * pi * g.center(2, kk) / g.length(2));
                        d.c[k](i, j, kk) += c * v;
                    }
        }
    }
    double n = rms_of(g, std::pow(l2_norm(g, d), 2));
    if (n > 0.0)
        d *= spec.rms / n;
    return d;
}

VectorField random_velocity(const Grid& g, const RandomFieldSpec& spec)
{
    check(spec);
    const double pi = std::numbers::pi;
    auto ms = modes(g, spec, 1);
    Array3 stream(g.node_shape());
    const Shape s = g.node_shape();
    for (std::size_t m = 0; m < ms.size(); ++m) {
        const double c = ms[m].weight * coefficient(spec, 3, static_cast<std::uint32_t>(m));
        for (int kk = 0; kk < s[2]; ++kk)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    const double x = g.face(0, i) / g.length(0), y = g.face(1, j) / g.length(1);
                    double v = std::sin(pi * x) * std::sin(ms[m].p * pi * x) * std::sin(pi * y) *
                               std::sin(ms[m].q * pi * y);
                    if (g.n_dim() == 3)
                        v *= std::sin(ms[m].r * pi * g.center(2, kk) / g.length(2));
                    stream(i, j, kk) += c * v;
                }
    }
    VectorField u = curl_of_stream(g, stream);
    double n = rms_of(g, std::pow(l2_norm(g, u), 2));
    if (n > 0.0)
        u *= spec.rms / n;
    return u;
}

Array3 random_dirichlet_scalar(const Grid& g, const RandomFieldSpec& spec)
{
    check(spec);
    const double pi = std::numbers::pi;
    auto ms = modes(g, spec, 1);
    Array3 u(g.cell_shape());
    const Shape s = g.cell_shape();
    for (std::size_t m = 0; m < ms.size(); ++m) {
        const double c = ms[m].weight * coefficient(spec, 4, static_cast<std::uint32_t>(m));
        for (int kk = 0; kk < s[2]; ++kk)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    double v = std::sin(ms[m].p * pi * g.center(0, i) / g.length(0)) *
                               std::sin(ms[m].q * pi * g.center(1, j) / g.length(1));
                    if (g.n_dim() == 3)
                        v *= std::sin(ms[m].r * pi * g.center(2, kk) / g.length(2));
                    u(i, j, kk) += c * v;
                }
    }
    double n = rms_of(g, std::pow(l2_norm(g, u), 2));
    if (n > 0.0)
        u *= spec.rms / n;
    return u;
}

} // namespace slc
