#include "slc/fields.hpp"
#include "slc/errors.hpp"
#include "slc/operators.hpp"

#include <algorithm>
#include <cmath>

namespace slc {

VectorField VectorField::zeros(const Grid& g)
{
    VectorField v;
    for (int c = 0; c < g.n_dim(); ++c)
        v.c.emplace_back(g.face_shape(c));
    return v;
}

VectorField& VectorField::operator+=(const VectorField& o)
{
    if (o.c.size() != c.size())
        throw DimensionError("vector field dimension mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] += o.c[i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o)
{
    if (o.c.size() != c.size())
        throw DimensionError("vector field dimension mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] -= o.c[i];
    return *this;
}

VectorField& VectorField::operator*=(double s)
{
    for (auto& a : c)
        a *= s;
    return *this;
}

void VectorField::axpy(double s, const VectorField& o)
{
    if (o.c.size() != c.size())
        throw DimensionError("vector field dimension mismatch");
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i].axpy(s, o.c[i]);
}

DirectorField DirectorField::zeros(const Grid& g)
{
    DirectorField d;
    for (auto& a : d.c)
        a = Array3(g.cell_shape());
    return d;
}

DirectorField DirectorField::constant(const Grid& g, std::array<double, 3> value)
{
    DirectorField d;
    for (int k = 0; k < 3; ++k)
        d.c[k] = Array3(g.cell_shape(), value[k]);
    return d;
}

DirectorField& DirectorField::operator+=(const DirectorField& o)
{
    for (int k = 0; k < 3; ++k)
        c[k] += o.c[k];
    return *this;
}

DirectorField& DirectorField::operator-=(const DirectorField& o)
{
    for (int k = 0; k < 3; ++k)
        c[k] -= o.c[k];
    return *this;
}

DirectorField& DirectorField::operator*=(double s)
{
    for (auto& a : c)
        a *= s;
    return *this;
}

void DirectorField::axpy(double s, const DirectorField& o)
{
    for (int k = 0; k < 3; ++k)
        c[k].axpy(s, o.c[k]);
}

State State::zeros(const Grid& g) { return State{VectorField::zeros(g), DirectorField::zeros(g), 0.0}; }

State& State::operator+=(const State& o)
{
    v += o.v;
    d += o.d;
    return *this;
}

State& State::operator-=(const State& o)
{
    v -= o.v;
    d -= o.d;
    return *this;
}

State& State::operator*=(double s)
{
    v *= s;
    d *= s;
    return *this;
}

void State::axpy(double s, const State& o)
{
    v.axpy(s, o.v);
    d.axpy(s, o.d);
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }
DirectorField operator+(DirectorField a, const DirectorField& b) { return a += b; }
DirectorField operator-(DirectorField a, const DirectorField& b) { return a -= b; }
DirectorField operator*(double s, DirectorField a) { return a *= s; }
State operator-(State a, const State& b) { return a -= b; }

bool all_finite(const State& s)
{
    for (const auto& a : s.v.c)
        if (!all_finite(a))
            return false;
    for (const auto& a : s.d.c)
        if (!all_finite(a))
            return false;
    return std::isfinite(s.t);
}

Array3 sample_cell(const Grid& g, const ScalarFunction& f)
{
    Array3 a(g.cell_shape());
    const Shape s = a.shape();
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i)
                a(i, j, k) = f(g.center(0, i), g.center(1, j), g.n_dim() == 3 ? g.center(2, k) : 0.0);
    return a;
}

Array3 sample_face(const Grid& g, int axis, const ScalarFunction& f)
{
    Array3 a(g.face_shape(axis));
    const Shape s = a.shape();
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                double x = axis == 0 ? g.face(0, i) : g.center(0, i);
                double y = axis == 1 ? g.face(1, j) : g.center(1, j);
                double z = g.n_dim() < 3 ? 0.0 : (axis == 2 ? g.face(2, k) : g.center(2, k));
                a(i, j, k) = f(x, y, z);
            }
    return a;
}

VectorField sample_vector(const Grid& g, const std::array<ScalarFunction, 3>& f)
{
    VectorField v;
    for (int c = 0; c < g.n_dim(); ++c)
        v.c.push_back(sample_face(g, c, f[c]));
    return v;
}

DirectorField sample_director(const Grid& g, const std::array<ScalarFunction, 3>& f)
{
    DirectorField d;
    for (int k = 0; k < 3; ++k)
        d.c[k] = sample_cell(g, f[k]);
    return d;
}

namespace {

// Quadrature weight of a face entry: half on the two boundary faces.
template <class Fn>
double face_sum(const Grid& g, int axis, const Array3& a, Fn&& fn)
{
    const Shape s = a.shape();
    double total = 0.0;
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                int idx[3] = {i, j, k};
                double w = (idx[axis] == 0 || idx[axis] == s[axis] - 1) ? 0.5 : 1.0;
                total += w * fn(a.index(i, j, k));
            }
    return total * g.cell_volume();
}

} // namespace

double inner(const Grid& g, const Array3& a, const Array3& b)
{
    g.require_cell(a);
    g.require_cell(b);
    return dot(a, b) * g.cell_volume();
}

double face_inner(const Grid& g, int axis, const Array3& a, const Array3& b)
{
    g.require_face(axis, a);
    g.require_face(axis, b);
    return face_sum(g, axis, a, [&](std::size_t n) { return a[n] * b[n]; });
}

double inner(const Grid& g, const VectorField& a, const VectorField& b)
{
    double s = 0.0;
    for (int c = 0; c < g.n_dim(); ++c)
        s += face_inner(g, c, a.c[c], b.c[c]);
    return s;
}

double inner(const Grid& g, const DirectorField& a, const DirectorField& b)
{
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        s += inner(g, a.c[k], b.c[k]);
    return s;
}

double l2_norm(const Grid& g, const Array3& cell) { return std::sqrt(inner(g, cell, cell)); }

double l4_norm(const Grid& g, const Array3& cell)
{
    g.require_cell(cell);
    double s = 0.0;
    for (double x : cell.values())
        s += x * x * x * x;
    return std::pow(s * g.cell_volume(), 0.25);
}

double linf_norm(const Grid& g, const Array3& cell)
{
    g.require_cell(cell);
    return max_abs(cell);
}

double l2_norm(const Grid& g, const VectorField& v) { return std::sqrt(inner(g, v, v)); }

double l4_norm(const Grid& g, const VectorField& v)
{
    double s = 0.0;
    for (int c = 0; c < g.n_dim(); ++c) {
        g.require_face(c, v.c[c]);
        const Array3& a = v.c[c];
        s += face_sum(g, c, a, [&](std::size_t n) { return a[n] * a[n] * a[n] * a[n]; });
    }
    return std::pow(s, 0.25);
}

double linf_norm(const Grid& g, const VectorField& v)
{
    double m = 0.0;
    for (int c = 0; c < g.n_dim(); ++c) {
        g.require_face(c, v.c[c]);
        m = std::max(m, max_abs(v.c[c]));
    }
    return m;
}

double l2_norm(const Grid& g, const DirectorField& d) { return std::sqrt(inner(g, d, d)); }

double l4_norm(const Grid& g, const DirectorField& d)
{
    double s = 0.0;
    for (std::size_t n = 0; n < d.c[0].size(); ++n) {
        double m2 = d.c[0][n] * d.c[0][n] + d.c[1][n] * d.c[1][n] + d.c[2][n] * d.c[2][n];
        s += m2 * m2;
    }
    return std::pow(s * g.cell_volume(), 0.25);
}

double linf_norm(const Grid& g, const DirectorField& d)
{
    g.require_cell(d.c[0]);
    double m = 0.0;
    for (std::size_t n = 0; n < d.c[0].size(); ++n)
        m = std::max(m, d.c[0][n] * d.c[0][n] + d.c[1][n] * d.c[1][n] + d.c[2][n] * d.c[2][n]);
    return std::sqrt(m);
}

Array3 derivative(const Grid& g, const Array3& u, int axis)
{
    g.require_cell(u);
    const int n = g.cells(axis);
    const double h = g.spacing(axis);
    Array3 out(u.shape());
    const Shape s = u.shape();
    std::vector<double> line(n), dl(n);
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                int idx[3] = {i, j, k};
                if (idx[axis] != 0)
                    continue;
                for (int m = 0; m < n; ++m) {
                    idx[axis] = m;
                    line[m] = u(idx[0], idx[1], idx[2]);
                }
                if (n >= 8) {
                    const double c = 1.0 / (12.0 * h);
                    dl[0] = c * (-25 * line[0] + 48 * line[1] - 36 * line[2] + 16 * line[3] - 3 * line[4]);
                    dl[1] = c * (-3 * line[0] - 10 * line[1] + 18 * line[2] - 6 * line[3] + line[4]);
                    for (int m = 2; m < n - 2; ++m)
                        dl[m] = c * (line[m - 2] - 8 * line[m - 1] + 8 * line[m + 1] - line[m + 2]);
                    dl[n - 2] = -c * (-3 * line[n - 1] - 10 * line[n - 2] + 18 * line[n - 3] - 6 * line[n - 4] +
                                      line[n - 5]);
                    dl[n - 1] = -c * (-25 * line[n - 1] + 48 * line[n - 2] - 36 * line[n - 3] + 16 * line[n - 4] -
                                      3 * line[n - 5]);
                } else {
                    const double c = 1.0 / (2.0 * h);
                    dl[0] = c * (-3 * line[0] + 4 * line[1] - line[2]);
                    for (int m = 1; m < n - 1; ++m)
                        dl[m] = c * (line[m + 1] - line[m - 1]);
                    dl[n - 1] = c * (3 * line[n - 1] - 4 * line[n - 2] + line[n - 3]);
                }
                for (int m = 0; m < n; ++m) {
                    idx[axis] = m;
                    out(idx[0], idx[1], idx[2]) = dl[m];
                }
            }
    return out;
}

double h_norm(const Grid& g, const Array3& u, int order)
{
    if (order < 0 || order > 2)
        throw DomainError("h_norm order must be 0, 1 or 2");
    double s = inner(g, u, u);
    if (order >= 1) {
        for (int a = 0; a < g.n_dim(); ++a) {
            Array3 da = derivative(g, u, a);
            s += inner(g, da, da);
            if (order == 2)
                for (int b = a; b < g.n_dim(); ++b) {
                    Array3 dab = derivative(g, da, b);
                    s += inner(g, dab, dab);
                }
        }
    }
    return std::sqrt(s);
}

double h_norm(const Grid& g, const DirectorField& d, int order)
{
    double s = 0.0;
    for (const auto& a : d.c) {
        double n = h_norm(g, a, order);
        s += n * n;
    }
    return std::sqrt(s);
}

namespace {

template <class Weight>
double cosine_weighted(const Grid& g, const DirectorField& d, Weight&& w)
{
    const auto& lam = g.neumann_modes();
    double s = 0.0;
    for (const auto& a : d.c) {
        Array3 coef = g.cosine_transform(a, Direction::forward);
        for (std::size_t n = 0; n < coef.size(); ++n)
            s += w(lam[n]) * coef[n] * coef[n];
    }
    return std::sqrt(s * g.cell_volume());
}

} // namespace

double a_half_norm(const Grid& g, const VectorField& v)
{
    double s = 0.0;
    for (int c = 0; c < g.n_dim(); ++c) {
        Array3 coef = g.face_sine_transform(c, v.c[c], Direction::forward);
        const auto& mu = g.face_modes(c);
        for (std::size_t n = 0; n < coef.size(); ++n)
            s += mu[n] * coef[n] * coef[n];
    }
    return std::sqrt(s * g.cell_volume());
}

double a_norm(const Grid& g, const VectorField& v)
{
    VectorField lap = VectorField::zeros(g);
    for (int c = 0; c < g.n_dim(); ++c)
        lap.c[c] = face_laplacian(g, c, v.c[c]);
    return l2_norm(g, leray_project(g, lap));
}

double grad_norm(const Grid& g, const DirectorField& d)
{
    return cosine_weighted(g, d, [](double l) { return l; });
}

double laplacian_norm(const Grid& g, const DirectorField& d)
{
    return cosine_weighted(g, d, [](double l) { return l * l; });
}

double x_alpha_norm(const Grid& g, const DirectorField& d, double alpha)
{
    const double p = 1.0 + 2.0 * alpha;
    return cosine_weighted(g, d, [p](double l) { return std::pow(1.0 + l, p); });
}

double h_space_norm(const Grid& g, const State& s)
{
    double v = l2_norm(g, s.v);
    double d = x_alpha_norm(g, s.d, 0.0);
    return std::sqrt(v * v + d * d);
}

double v_norm(const Grid& g, const State& s)
{
    double v = a_half_norm(g, s.v);
    double d = h_norm(g, s.d, 2);
    return std::sqrt(v * v + d * d);
}

double e_norm(const Grid& g, const State& s)
{
    double v = a_norm(g, s.v);
    double d = x_alpha_norm(g, s.d, 1.0);
    return std::sqrt(v * v + d * d);
}

XtAccumulator xt_update(XtAccumulator acc, double v_norm_value, double e_norm_value, double dt)
{
    if (!(dt >= 0.0))
        throw DomainError("xt_update needs dt >= 0");
    acc.sup_v_norm_sq = std::max(acc.sup_v_norm_sq, v_norm_value * v_norm_value);
    acc.integral_e_norm_sq += dt * e_norm_value * e_norm_value;
    return acc;
}

XtAccumulator xt_update(XtAccumulator acc, const Grid& g, const State& s, double dt)
{
    return xt_update(acc, v_norm(g, s), dt > 0.0 ? e_norm(g, s) : 0.0, dt);
}

} // namespace slc
