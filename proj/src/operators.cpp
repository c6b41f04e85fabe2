#include "slc/operators.hpp"
#include "slc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace slc {

namespace {

using Idx = std::array<int, 3>;

double at(const Array3& a, const Idx& p) { return a(p[0], p[1], p[2]); }

Idx shifted(Idx p, int axis, int by)
{
    p[axis] += by;
    return p;
}

// Cell value with one ghost layer: reflected (Neumann) or antireflected (Dirichlet).
double ghost(const Array3& a, Idx p, int axis, bool reflect)
{
    int n = a.extent(axis);
    if (p[axis] >= 0 && p[axis] < n)
        return at(a, p);
    p[axis] = p[axis] < 0 ? 0 : n - 1;
    return reflect ? at(a, p) : -at(a, p);
}

// Clamp an index into the cell range; used for reflected-ghost differences.
Idx clamp_cell(Idx p, int axis, int n)
{
    p[axis] = std::clamp(p[axis], 0, n - 1);
    return p;
}

template <class Fn>
void for_each(const Shape& s, Fn&& fn)
{
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i)
                fn(Idx{i, j, k});
}

void zero_boundary_faces(const Grid& g, VectorField& u)
{
    for (int c = 0; c < g.n_dim(); ++c) {
        Array3& a = u.c[c];
        for_each(a.shape(), [&](const Idx& p) {
            if (p[c] == 0 || p[c] == a.extent(c) - 1)
                a(p[0], p[1], p[2]) = 0.0;
        });
    }
}

} // namespace

VectorField leray_project(const Grid& g, const VectorField& u, PressureField* pressure)
{
    VectorField w = u;
    zero_boundary_faces(g, w);
    Array3 div = divergence(g, w.c);
    Array3 coef = g.cosine_transform(div, Direction::forward);
    const auto& lam = g.neumann_modes();
    for (std::size_t n = 0; n < coef.size(); ++n)
        coef[n] = lam[n] > 0.0 ? -coef[n] / lam[n] : 0.0;
    Array3 phi = g.cosine_transform(coef, Direction::inverse);
    auto grad = gradient(g, phi, BcKind::neumann);
    for (int c = 0; c < g.n_dim(); ++c)
        w.c[c] -= grad[c];
    if (pressure)
        pressure->p = std::move(phi);
    return w;
}

DirectorField semigroup_director(const Grid& g, double t, const DirectorField& d)
{
    if (!(t >= 0.0))
        throw DomainError("semigroup time must be nonnegative");
    const auto& lam = g.neumann_modes();
    DirectorField out;
    for (int k = 0; k < 3; ++k) {
        Array3 coef = g.cosine_transform(d.c[k], Direction::forward);
        for (std::size_t n = 0; n < coef.size(); ++n)
            coef[n] *= std::exp(-lam[n] * t);
        out.c[k] = g.cosine_transform(coef, Direction::inverse);
    }
    return out;
}

VectorField semigroup_velocity_step(const Grid& g, double dt, const VectorField& v)
{
    if (!(dt >= 0.0))
        throw DomainError("velocity step needs dt >= 0");
    VectorField out = VectorField::zeros(g);
    for (int c = 0; c < g.n_dim(); ++c) {
        Array3 coef = g.face_sine_transform(c, v.c[c], Direction::forward);
        const auto& mu = g.face_modes(c);
        for (std::size_t n = 0; n < coef.size(); ++n)
            coef[n] /= 1.0 + dt * mu[n];
        out.c[c] = g.face_sine_transform(c, coef, Direction::inverse);
    }
    return leray_project(g, out);
}

VectorField b1(const Grid& g, const VectorField& u, const VectorField& w)
{
    VectorField out = VectorField::zeros(g);
    const int nd = g.n_dim();
    for (int c = 0; c < nd; ++c) {
        const Array3& uc = u.c[c];
        const Array3& wc = w.c[c];
        Array3& oc = out.c[c];
        const double inv_hc = 1.0 / g.spacing(c);
        for_each(oc.shape(), [&](const Idx& p) {
            if (p[c] == 0 || p[c] == g.cells(c))
                return;
            Idx pp = shifted(p, c, 1), pm = shifted(p, c, -1);
            double up = 0.5 * (at(uc, p) + at(uc, pp));
            double um = 0.5 * (at(uc, pm) + at(uc, p));
            double acc = (up * 0.5 * (at(wc, p) + at(wc, pp)) - um * 0.5 * (at(wc, pm) + at(wc, p))) * inv_hc;
            for (int a = 0; a < nd; ++a) {
                if (a == c)
                    continue;
                const Array3& ua = u.c[a];
                // u_a at a-faces p[a] and p[a]+1, averaged over the two cells sharing the c-face.
                Idx lo = p, hi = shifted(p, a, 1);
                double ua_hi = 0.5 * (at(ua, shifted(hi, c, -1)) + at(ua, hi));
                double ua_lo = 0.5 * (at(ua, shifted(lo, c, -1)) + at(ua, lo));
                double w0 = at(wc, p);
                double w_hi = 0.5 * (w0 + ghost(wc, shifted(p, a, 1), a, false));
                double w_lo = 0.5 * (ghost(wc, shifted(p, a, -1), a, false) + w0);
                acc += (ua_hi * w_hi - ua_lo * w_lo) / g.spacing(a);
            }
            oc(p[0], p[1], p[2]) = acc;
        });
    }
    return out;
}

DirectorField b2(const Grid& g, const VectorField& v, const DirectorField& d)
{
    DirectorField out = DirectorField::zeros(g);
    const int nd = g.n_dim();
    const Shape s = g.cell_shape();
    for (int k = 0; k < 3; ++k) {
        const Array3& dk = d.c[k];
        Array3& ok = out.c[k];
        for_each(s, [&](const Idx& p) {
            double acc = 0.0;
            double d0 = at(dk, p);
            for (int a = 0; a < nd; ++a) {
                const Array3& va = v.c[a];
                double v_hi = at(va, shifted(p, a, 1));
                double v_lo = at(va, p);
                double d_hi = 0.5 * (d0 + ghost(dk, shifted(p, a, 1), a, true));
                double d_lo = 0.5 * (ghost(dk, shifted(p, a, -1), a, true) + d0);
                acc += (v_hi * d_hi - v_lo * d_lo) / g.spacing(a);
            }
            ok(p[0], p[1], p[2]) = acc;
        });
    }
    return out;
}

VectorField m_term(const Grid& g, const DirectorField& d1, const DirectorField& d2)
{
    const int nd = g.n_dim();
    const Shape s = g.cell_shape();
    VectorField out = VectorField::zeros(g);
    for (int c = 0; c < nd; ++c) {
        const int nc = g.cells(c);
        const double hc = g.spacing(c);
        // Diagonal entry T_cc at cell centres from centred differences.
        Array3 tcc(s);
        for_each(s, [&](const Idx& p) {
            double t = 0.0;
            for (int k = 0; k < 3; ++k) {
                Idx hi = clamp_cell(shifted(p, c, 1), c, nc), lo = clamp_cell(shifted(p, c, -1), c, nc);
                double g1 = (at(d1.c[k], hi) - at(d1.c[k], lo)) / (2.0 * hc);
                double g2 = (at(d2.c[k], hi) - at(d2.c[k], lo)) / (2.0 * hc);
                t += g1 * g2;
            }
            tcc(p[0], p[1], p[2]) = t;
        });
        Array3& oc = out.c[c];
        for_each(oc.shape(), [&](const Idx& p) {
            if (p[c] == 0 || p[c] == nc)
                return;
            Idx cm = shifted(p, c, -1);
            double acc = (at(tcc, p) - at(tcc, cm)) / hc;
            for (int a = 0; a < nd; ++a) {
                if (a == c)
                    continue;
                const int na = g.cells(a);
                const double ha = g.spacing(a);
                // Off-diagonal entry T_ca on the edge between cells {cm, p} along c at a-face index e.
                auto edge = [&](int e) {
                    double t = 0.0;
                    Idx q_lo = p, q_hi = p;
                    q_lo[a] = e - 1;
                    q_hi[a] = e;
                    q_lo = clamp_cell(q_lo, a, na);
                    q_hi = clamp_cell(q_hi, a, na);
                    Idx r_lo = shifted(q_lo, c, -1), r_hi = shifted(q_hi, c, -1);
                    for (int k = 0; k < 3; ++k) {
                        const Array3& x = d1.c[k];
                        const Array3& y = d2.c[k];
                        double dc = 0.5 * ((at(x, q_lo) - at(x, r_lo)) + (at(x, q_hi) - at(x, r_hi))) / hc;
                        double da = 0.5 * ((at(y, r_hi) - at(y, r_lo)) + (at(y, q_hi) - at(y, q_lo))) / ha;
                        t += dc * da;
                    }
                    return t;
                };
                acc += (edge(p[a] + 1) - edge(p[a])) / ha;
            }
            oc(p[0], p[1], p[2]) = acc;
        });
    }
    return leray_project(g, out);
}

VectorField m_term_expanded(const Grid& g, const DirectorField& d)
{
    const int nd = g.n_dim();
    const Shape s = g.cell_shape();
    VectorField out = VectorField::zeros(g);
    Array3 half_sq(s);
    for (int k = 0; k < 3; ++k) {
        Array3 lap = laplacian(g, d.c[k], BcKind::neumann);
        auto grad = gradient(g, d.c[k], BcKind::neumann);
        for (int c = 0; c < nd; ++c) {
            Array3& oc = out.c[c];
            for_each(oc.shape(), [&](const Idx& p) {
                if (p[c] == 0 || p[c] == g.cells(c))
                    return;
                double avg = 0.5 * (at(lap, shifted(p, c, -1)) + at(lap, p));
                oc(p[0], p[1], p[2]) += avg * at(grad[c], p);
            });
        }
        for (int c = 0; c < nd; ++c) {
            const int nc = g.cells(c);
            for_each(s, [&](const Idx& p) {
                Idx hi = clamp_cell(shifted(p, c, 1), c, nc), lo = clamp_cell(shifted(p, c, -1), c, nc);
                double gk = (at(d.c[k], hi) - at(d.c[k], lo)) / (2.0 * g.spacing(c));
                half_sq(p[0], p[1], p[2]) += 0.5 * gk * gk;
            });
        }
    }
    auto grad_half = gradient(g, half_sq, BcKind::neumann);
    for (int c = 0; c < nd; ++c)
        out.c[c] += grad_half[c];
    return leray_project(g, out);
}

DirectorField f_penalty(const DirectorField& d, double eps)
{
    if (!(eps > 0.0))
        throw DomainError("eps must be positive");
    const double inv = 1.0 / (eps * eps);
    DirectorField out = d;
    for (std::size_t n = 0; n < d.c[0].size(); ++n) {
        double m2 = d.c[0][n] * d.c[0][n] + d.c[1][n] * d.c[1][n] + d.c[2][n] * d.c[2][n];
        double factor = m2 <= 1.0 ? inv * (m2 - 1.0) : 0.0;
        for (int k = 0; k < 3; ++k)
            out.c[k][n] *= factor;
    }
    return out;
}

DirectorField g_cross(const DirectorField& d, const DirectorField& h)
{
    DirectorField out = d;
    for (std::size_t n = 0; n < d.c[0].size(); ++n) {
        double a0 = d.c[0][n], a1 = d.c[1][n], a2 = d.c[2][n];
        double b0 = h.c[0][n], b1 = h.c[1][n], b2 = h.c[2][n];
        out.c[0][n] = a1 * b2 - a2 * b1;
        out.c[1][n] = a2 * b0 - a0 * b2;
        out.c[2][n] = a0 * b1 - a1 * b0;
    }
    return out;
}

DirectorField g2_cross(const DirectorField& d, const DirectorField& h) { return g_cross(g_cross(d, h), h); }

DirectorField magnetic_field(const Grid& g, const MagneticFieldSpec& spec)
{
    if (spec.profile != "sine_bump")
        throw ConfigError("unknown magnetic profile '" + spec.profile + "'");
    const double pi = std::numbers::pi;
    const double h0 = spec.amplitude;
    const double lx = g.length(0), ly = g.length(1), lz = g.length(2);
    const bool three = g.n_dim() == 3;
    DirectorField h = DirectorField::zeros(g);
    h.c[0] = sample_cell(g, [=](double x, double y, double z) {
        double v = h0 * std::sin(pi * x / lx) * std::sin(pi * y / ly);
        return three ? v * std::sin(pi * z / lz) : v;
    });
    return h;
}

double magnetic_linf(const Grid& g, const DirectorField& h) { return linf_norm(g, h); }

double magnetic_w13(const Grid& g, const DirectorField& h)
{
    double s = 0.0;
    auto cube_sum = [&](const Array3& a) {
        double t = 0.0;
        for (double x : a.values())
            t += std::abs(x) * x * x;
        return t * g.cell_volume();
    };
    for (const auto& comp : h.c) {
        s += cube_sum(comp);
        for (int a = 0; a < g.n_dim(); ++a)
            s += cube_sum(derivative(g, comp, a));
    }
    return std::cbrt(s);
}

std::string to_string(NoiseKind kind)
{
    return kind == NoiseKind::additive_trace_class ? "additive_trace_class" : "linear_multiplicative";
}

NoiseKind parse_noise_kind(const std::string& name)
{
    if (name == "additive_trace_class" || name == "additive")
        return NoiseKind::additive_trace_class;
    if (name == "linear_multiplicative" || name == "multiplicative")
        return NoiseKind::linear_multiplicative;
    throw ConfigError("unknown noise kind '" + name + "'");
}

void validate(const NoiseCoefficientSpec& spec)
{
    std::vector<std::string> errors;
    if (spec.mode_count <= 0)
        errors.push_back("noise.mode_count must be positive");
    if (!(spec.decay_exponent > 1.0))
        errors.push_back("noise.decay_exponent must exceed 1: the Hilbert-Schmidt mass sum (1+mu_j)^(1-2s) "
                         "diverges otherwise");
    if (!(spec.amplitude >= 0.0))
        errors.push_back("noise.amplitude must be nonnegative");
    if (!(spec.gain_clip > 0.0))
        errors.push_back("noise.gain_clip must be positive");
    if (!errors.empty())
        throw ConfigError(errors);
}

VectorField curl_of_stream(const Grid& g, const Array3& stream)
{
    if (stream.shape() != g.node_shape())
        throw DimensionError("stream function must live on the node layout");
    VectorField u = VectorField::zeros(g);
    for_each(u.c[0].shape(), [&](const Idx& i) {
        u.c[0](i[0], i[1], i[2]) = (stream(i[0], i[1] + 1, i[2]) - stream(i[0], i[1], i[2])) / g.spacing(1);
    });
    for_each(u.c[1].shape(), [&](const Idx& i) {
        u.c[1](i[0], i[1], i[2]) = -(stream(i[0] + 1, i[1], i[2]) - stream(i[0], i[1], i[2])) / g.spacing(0);
    });
    return u;
}

namespace {

double clamped_profile(int p, double s) { return std::sin(std::numbers::pi * s) * std::sin(std::numbers::pi * p * s); }

} // namespace

NoiseBasis NoiseBasis::build(const Grid& g, int mode_count)
{
    if (mode_count <= 0)
        throw ConfigError("noise.mode_count must be positive");
    const int nx = g.cells(0), ny = g.cells(1), nz = g.cells(2);
    const bool three = g.n_dim() == 3;
    // Candidate modes (p, q[, r]) up to half the grid resolution, coarsest first.
    std::vector<std::tuple<double, int, int, int>> cand;
    for (int p = 1; p < nx / 2; ++p)
        for (int q = 1; q < ny / 2; ++q)
            for (int r = 1; r <= (three ? nz / 2 - 1 : 1); ++r) {
                double key = std::pow(p / g.length(0), 2) + std::pow(q / g.length(1), 2);
                if (three)
                    key += std::pow(r / g.length(2), 2);
                cand.emplace_back(key, p, q, r);
            }
    if (static_cast<std::size_t>(mode_count) > cand.size())
        throw ConfigError("noise.mode_count exceeds the number of resolvable modes on this grid");
    std::stable_sort(cand.begin(), cand.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });

    NoiseBasis basis;
    for (int m = 0; m < mode_count; ++m) {
        auto [key, p, q, r] = cand[m];
        Array3 phi(g.node_shape());
        for_each(phi.shape(), [&](const Idx& i) {
            double v = clamped_profile(p, static_cast<double>(i[0]) / nx) * clamped_profile(q, static_cast<double>(i[1]) / ny);
            if (three)
                v *= std::sin(std::numbers::pi * r * (i[2] + 0.5) / nz);
            phi(i[0], i[1], i[2]) = v;
        });
        VectorField psi = curl_of_stream(g, phi);
        // Modified Gram-Schmidt, two passes.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& prev : basis.psi)
                psi.axpy(-inner(g, psi, prev), prev);
        psi *= 1.0 / l2_norm(g, psi);
        double a = a_half_norm(g, psi);
        basis.mu.push_back(a * a);
        basis.psi.push_back(std::move(psi));
    }
    return basis;
}

double noise_weight(const NoiseCoefficientSpec& spec, const NoiseBasis& basis, int j)
{
    return spec.amplitude * std::pow(1.0 + basis.mu[j], -spec.decay_exponent);
}

double hs_mass(const NoiseCoefficientSpec& spec, const NoiseBasis& basis)
{
    double s = 0.0;
    for (int j = 0; j < spec.mode_count; ++j)
        s += spec.amplitude * spec.amplitude * std::pow(1.0 + basis.mu[j], 1.0 - 2.0 * spec.decay_exponent);
    return s;
}

double ell5(const NoiseCoefficientSpec& spec, const NoiseBasis& basis)
{
    // Additive: ||S||^2 = mass.  Multiplicative: gain^2 <= ||v||^2, so the same constant works.
    return hs_mass(spec, basis);
}

double noise_lipschitz(const NoiseCoefficientSpec& spec, const NoiseBasis& basis)
{
    return spec.kind == NoiseKind::additive_trace_class ? 0.0 : std::sqrt(hs_mass(spec, basis));
}

double noise_gain(const Grid& g, const NoiseCoefficientSpec& spec, const VectorField& v)
{
    if (spec.kind == NoiseKind::additive_trace_class)
        return 1.0;
    return std::min(l2_norm(g, v), spec.gain_clip);
}

VectorField noise_coeff(const Grid& g, const NoiseCoefficientSpec& spec, const NoiseBasis& basis,
                        const VectorField& v, const std::vector<double>& k)
{
    if (static_cast<int>(k.size()) != spec.mode_count || static_cast<int>(basis.psi.size()) < spec.mode_count)
        throw DimensionError("noise coefficient vector length must equal mode_count");
    VectorField out = VectorField::zeros(g);
    if (spec.amplitude == 0.0)
        return out;
    const double gain = noise_gain(g, spec, v);
    for (int j = 0; j < spec.mode_count; ++j)
        out.axpy(gain * noise_weight(spec, basis, j) * k[j], basis.psi[j]);
    return out;
}

Model Model::build(const Grid& g, double eps, const NoiseCoefficientSpec& noise, const MagneticFieldSpec& magnetic)
{
    validate(noise);
    if (!(eps > 0.0))
        throw ConfigError("eps must be positive");
    Model m{g, eps, noise, NoiseBasis::build(g, noise.mode_count), magnetic, magnetic_field(g, magnetic)};
    return m;
}

State assemble_F(const Model& m, const State& y)
{
    const Grid& g = m.grid;
    State out{VectorField::zeros(g), DirectorField::zeros(g), 0.0};
    if (m.nonlinearity) {
        if (m.evolve_velocity) {
            out.v = leray_project(g, b1(g, y.v, y.v));
            out.v += m_term(g, y.d, y.d);
        }
        out.d = b2(g, y.v, y.d);
    }
    if (m.penalty)
        out.d += f_penalty(y.d, m.eps);
    return out;
}

State assemble_L(const Model& m, const State& y)
{
    State out;
    out.v = VectorField::zeros(m.grid);
    out.d = g2_cross(y.d, m.h);
    out.d *= -0.5;
    return out;
}

State assemble_G(const Model& m, const State& y, const std::vector<double>& k, double dw2)
{
    State out;
    out.v = m.evolve_velocity ? noise_coeff(m.grid, m.noise, m.basis, y.v, k) : VectorField::zeros(m.grid);
    out.d = g_cross(y.d, m.h);
    out.d *= dw2;
    return out;
}

} // namespace slc
