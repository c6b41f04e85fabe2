#include "slc/grid.hpp"
#include "slc/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

namespace slc {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

fftw_r2r_kind forward_kind(AxisBasis b)
{
    switch (b) {
    case AxisBasis::cosine: return FFTW_REDFT10;
    case AxisBasis::sine_cell: return FFTW_RODFT10;
    case AxisBasis::sine_node: return FFTW_RODFT00;
    }
    return FFTW_REDFT10;
}

fftw_r2r_kind inverse_kind(AxisBasis b)
{
    switch (b) {
    case AxisBasis::cosine: return FFTW_REDFT01;
    case AxisBasis::sine_cell: return FFTW_RODFT01;
    case AxisBasis::sine_node: return FFTW_RODFT00;
    }
    return FFTW_REDFT01;
}

// Orthonormal scaling of FFTW's unnormalized r2r outputs, per axis mode k of m points.
double forward_scale(AxisBasis b, int k, int m)
{
    switch (b) {
    case AxisBasis::cosine: return k == 0 ? 0.5 / std::sqrt(double(m)) : 1.0 / std::sqrt(2.0 * m);
    case AxisBasis::sine_cell: return k == m - 1 ? 0.5 / std::sqrt(double(m)) : 1.0 / std::sqrt(2.0 * m);
    case AxisBasis::sine_node: return 1.0 / std::sqrt(2.0 * (m + 1));
    }
    return 1.0;
}

double inverse_scale(AxisBasis b, int k, int m)
{
    switch (b) {
    case AxisBasis::cosine: return k == 0 ? 1.0 / std::sqrt(double(m)) : 1.0 / std::sqrt(2.0 * m);
    case AxisBasis::sine_cell: return k == m - 1 ? 1.0 / std::sqrt(double(m)) : 1.0 / std::sqrt(2.0 * m);
    case AxisBasis::sine_node: return 1.0 / std::sqrt(2.0 * (m + 1));
    }
    return 1.0;
}

struct Plan {
    Shape shape{1, 1, 1};
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;
    std::vector<double> fwd_scale;
    std::vector<double> inv_scale;
    std::vector<double> eig;

    Plan(int n_dim, Shape extents, std::array<AxisBasis, 3> basis, const std::array<int, 3>& cells,
         const std::array<double, 3>& h)
        : shape(extents)
    {
        const std::size_t total = std::size_t(shape[0]) * shape[1] * shape[2];
        // FFTW is row-major; our x index is fastest, so axes are passed reversed.
        int dims[3];
        fftw_r2r_kind fk[3], ik[3];
        for (int r = 0; r < n_dim; ++r) {
            int axis = n_dim - 1 - r;
            dims[r] = shape[axis];
            fk[r] = forward_kind(basis[axis]);
            ik[r] = inverse_kind(basis[axis]);
        }
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            double* a = fftw_alloc_real(total);
            double* b = fftw_alloc_real(total);
            unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
            fwd = fftw_plan_r2r(n_dim, dims, a, b, fk, flags);
            inv = fftw_plan_r2r(n_dim, dims, a, b, ik, flags);
            fftw_free(a);
            fftw_free(b);
        }
        if (!fwd || !inv)
            throw ConfigError("transform planning failed");

        fwd_scale.assign(total, 1.0);
        inv_scale.assign(total, 1.0);
        eig.assign(total, 0.0);
        for (int k2 = 0; k2 < shape[2]; ++k2)
            for (int k1 = 0; k1 < shape[1]; ++k1)
                for (int k0 = 0; k0 < shape[0]; ++k0) {
                    std::size_t n = std::size_t(k0) + std::size_t(shape[0]) * (k1 + std::size_t(shape[1]) * k2);
                    int kk[3] = {k0, k1, k2};
                    double fs = 1.0, is = 1.0, ev = 0.0;
                    for (int axis = 0; axis < n_dim; ++axis) {
                        fs *= forward_scale(basis[axis], kk[axis], shape[axis]);
                        is *= inverse_scale(basis[axis], kk[axis], shape[axis]);
                        ev += axis_eigenvalue(basis[axis], kk[axis], cells[axis], h[axis]);
                    }
                    fwd_scale[n] = fs;
                    inv_scale[n] = is;
                    eig[n] = ev;
                }
    }

    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    ~Plan()
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (fwd)
            fftw_destroy_plan(fwd);
        if (inv)
            fftw_destroy_plan(inv);
    }

    void forward(const double* in, double* out) const
    {
        std::vector<double> buf(in, in + fwd_scale.size());
        fftw_execute_r2r(fwd, buf.data(), out);
        for (std::size_t n = 0; n < fwd_scale.size(); ++n)
            out[n] *= fwd_scale[n];
    }

    void inverse(const double* in, double* out) const
    {
        std::vector<double> buf(fwd_scale.size());
        for (std::size_t n = 0; n < buf.size(); ++n)
            buf[n] = in[n] * inv_scale[n];
        fftw_execute_r2r(inv, buf.data(), out);
    }
};

} // namespace

struct Grid::Impl {
    std::unique_ptr<Plan> cell_cos;
    std::unique_ptr<Plan> cell_sin;
    std::array<std::unique_ptr<Plan>, 3> face;
    Spectrum spectrum;
};

double axis_eigenvalue(AxisBasis basis, int k, int n, double h)
{
    const double pi = std::numbers::pi;
    int wave = basis == AxisBasis::cosine ? k : k + 1;
    double s = std::sin(pi * wave / (2.0 * n));
    return 4.0 * s * s / (h * h);
}

BcKind parse_bc_kind(std::string_view name)
{
    if (name == "dirichlet")
        return BcKind::dirichlet;
    if (name == "neumann")
        return BcKind::neumann;
    throw ConfigError("unknown boundary condition kind '" + std::string(name) + "'");
}

Grid::Grid(int n_dim, std::array<int, 3> cells, std::array<double, 3> lengths)
    : n_dim_(n_dim), cells_(cells), lengths_(lengths), spacing_{0, 0, 0}
{
    std::vector<std::string> errors;
    if (n_dim != 2 && n_dim != 3)
        throw ConfigError("n_dim must be 2 or 3, got " + std::to_string(n_dim));
    for (int a = 0; a < n_dim; ++a) {
        if (cells[a] < 4 || !is_power_of_two(cells[a]))
            errors.push_back("cell count along axis " + std::to_string(a) + " must be a power of two >= 4, got " +
                             std::to_string(cells[a]));
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
            errors.push_back("length along axis " + std::to_string(a) + " must be positive");
    }
    if (!errors.empty())
        throw ConfigError(errors);
    if (n_dim == 2) {
        cells_[2] = 1;
        lengths_[2] = 0.0;
    }
    for (int a = 0; a < n_dim; ++a)
        spacing_[a] = lengths_[a] / cells_[a];

    auto impl = std::make_shared<Impl>();
    std::array<AxisBasis, 3> cos_basis{AxisBasis::cosine, AxisBasis::cosine, AxisBasis::cosine};
    std::array<AxisBasis, 3> sin_basis{AxisBasis::sine_cell, AxisBasis::sine_cell, AxisBasis::sine_cell};
    impl->cell_cos = std::make_unique<Plan>(n_dim, cell_shape(), cos_basis, cells_, spacing_);
    impl->cell_sin = std::make_unique<Plan>(n_dim, cell_shape(), sin_basis, cells_, spacing_);
    for (int c = 0; c < n_dim; ++c) {
        auto basis = sin_basis;
        basis[c] = AxisBasis::sine_node;
        Shape s = cell_shape();
        s[c] = cells_[c] - 1;
        impl->face[c] = std::make_unique<Plan>(n_dim, s, basis, cells_, spacing_);
    }

    Spectrum& sp = impl->spectrum;
    for (int a = 0; a < n_dim; ++a)
        for (int k = 0; k < cells_[a]; ++k) {
            sp.neumann_axis[a].push_back(axis_eigenvalue(AxisBasis::cosine, k, cells_[a], spacing_[a]));
            sp.dirichlet_axis[a].push_back(axis_eigenvalue(AxisBasis::sine_cell, k, cells_[a], spacing_[a]));
        }
    sp.neumann_eigenvalues = impl->cell_cos->eig;
    sp.dirichlet_eigenvalues = impl->cell_sin->eig;
    std::sort(sp.neumann_eigenvalues.begin(), sp.neumann_eigenvalues.end());
    std::sort(sp.dirichlet_eigenvalues.begin(), sp.dirichlet_eigenvalues.end());
    impl_ = std::move(impl);
}

Grid build_grid(int n_dim, std::array<int, 3> cells, std::array<double, 3> lengths)
{
    return Grid(n_dim, cells, lengths);
}

std::size_t Grid::cell_count() const { return std::size_t(cells_[0]) * cells_[1] * cells_[2]; }

double Grid::cell_volume() const
{
    double v = 1.0;
    for (int a = 0; a < n_dim_; ++a)
        v *= spacing_[a];
    return v;
}

double Grid::measure() const
{
    double v = 1.0;
    for (int a = 0; a < n_dim_; ++a)
        v *= lengths_[a];
    return v;
}

Shape Grid::cell_shape() const { return {cells_[0], cells_[1], cells_[2]}; }

Shape Grid::face_shape(int axis) const
{
    Shape s = cell_shape();
    s[axis] += 1;
    return s;
}

Shape Grid::node_shape() const { return {cells_[0] + 1, cells_[1] + 1, cells_[2]}; }

const Spectrum& Grid::spectrum() const { return impl_->spectrum; }

void Grid::require_cell(const Array3& a) const
{
    if (a.shape() != cell_shape())
        throw DimensionError("array does not match the cell layout of the grid");
}

void Grid::require_face(int axis, const Array3& a) const
{
    if (axis < 0 || axis >= n_dim_ || a.shape() != face_shape(axis))
        throw DimensionError("array does not match the face layout of the grid");
}

Array3 Grid::cosine_transform(const Array3& in, Direction dir) const
{
    require_cell(in);
    Array3 out(in.shape());
    if (dir == Direction::forward)
        impl_->cell_cos->forward(in.data(), out.data());
    else
        impl_->cell_cos->inverse(in.data(), out.data());
    return out;
}

Array3 Grid::sine_transform(const Array3& in, Direction dir) const
{
    require_cell(in);
    Array3 out(in.shape());
    if (dir == Direction::forward)
        impl_->cell_sin->forward(in.data(), out.data());
    else
        impl_->cell_sin->inverse(in.data(), out.data());
    return out;
}

Array3 Grid::face_sine_transform(int axis, const Array3& in, Direction dir) const
{
    const Plan& plan = *impl_->face[axis];
    const Shape& s = plan.shape;
    if (dir == Direction::forward) {
        require_face(axis, in);
        Array3 interior(s);
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    int idx[3] = {i, j, k};
                    idx[axis] += 1;
                    interior(i, j, k) = in(idx[0], idx[1], idx[2]);
                }
        Array3 out(s);
        plan.forward(interior.data(), out.data());
        return out;
    }
    if (in.shape() != s)
        throw DimensionError("coefficient array does not match the face transform");
    Array3 interior(s);
    plan.inverse(in.data(), interior.data());
    Array3 out(face_shape(axis));
    for (int k = 0; k < s[2]; ++k)
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                int idx[3] = {i, j, k};
                idx[axis] += 1;
                out(idx[0], idx[1], idx[2]) = interior(i, j, k);
            }
    return out;
}

const std::vector<double>& Grid::neumann_modes() const { return impl_->cell_cos->eig; }
const std::vector<double>& Grid::dirichlet_modes() const { return impl_->cell_sin->eig; }
const std::vector<double>& Grid::face_modes(int axis) const { return impl_->face[axis]->eig; }

bool Grid::operator==(const Grid& other) const
{
    return n_dim_ == other.n_dim_ && cells_ == other.cells_ && lengths_ == other.lengths_;
}

namespace {

// Cell value with a ghost layer one cell outside the domain.
double ghosted(const Array3& u, int axis, int idx[3], BcKind bc)
{
    int n = u.extent(axis);
    int i = idx[axis];
    if (i >= 0 && i < n)
        return u(idx[0], idx[1], idx[2]);
    int save = i;
    idx[axis] = i < 0 ? 0 : n - 1;
    double v = u(idx[0], idx[1], idx[2]);
    idx[axis] = save;
    return bc == BcKind::neumann ? v : -v;
}

} // namespace

std::vector<Array3> gradient(const Grid& g, const Array3& u, BcKind bc)
{
    g.require_cell(u);
    std::vector<Array3> out;
    for (int c = 0; c < g.n_dim(); ++c) {
        Array3 f(g.face_shape(c));
        const double inv_h = 1.0 / g.spacing(c);
        const Shape& s = f.shape();
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    int hi[3] = {i, j, k};
                    int lo[3] = {i, j, k};
                    lo[c] -= 1;
                    f(i, j, k) = (ghosted(u, c, hi, bc) - ghosted(u, c, lo, bc)) * inv_h;
                }
        out.push_back(std::move(f));
    }
    return out;
}

Array3 divergence(const Grid& g, const std::vector<Array3>& f)
{
    if (static_cast<int>(f.size()) != g.n_dim())
        throw DimensionError("divergence needs one face array per axis");
    for (int c = 0; c < g.n_dim(); ++c)
        g.require_face(c, f[c]);
    Array3 out(g.cell_shape());
    const Shape s = g.cell_shape();
    for (int c = 0; c < g.n_dim(); ++c) {
        const double inv_h = 1.0 / g.spacing(c);
        const int di = c == 0, dj = c == 1, dk = c == 2;
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i)
                    out(i, j, k) += (f[c](i + di, j + dj, k + dk) - f[c](i, j, k)) * inv_h;
    }
    return out;
}

Array3 laplacian(const Grid& g, const Array3& u, BcKind bc)
{
    g.require_cell(u);
    Array3 out(u.shape());
    const Shape s = u.shape();
    for (int c = 0; c < g.n_dim(); ++c) {
        const double inv_h2 = 1.0 / (g.spacing(c) * g.spacing(c));
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    int lo[3] = {i, j, k};
                    int hi[3] = {i, j, k};
                    lo[c] -= 1;
                    hi[c] += 1;
                    out(i, j, k) += (ghosted(u, c, hi, bc) - 2.0 * u(i, j, k) + ghosted(u, c, lo, bc)) * inv_h2;
                }
    }
    return out;
}

Array3 face_laplacian(const Grid& g, int axis, const Array3& u)
{
    g.require_face(axis, u);
    Array3 out(u.shape());
    const Shape s = u.shape();
    for (int c = 0; c < g.n_dim(); ++c) {
        const double inv_h2 = 1.0 / (g.spacing(c) * g.spacing(c));
        for (int k = 0; k < s[2]; ++k)
            for (int j = 0; j < s[1]; ++j)
                for (int i = 0; i < s[0]; ++i) {
                    int idx[3] = {i, j, k};
                    if (idx[axis] == 0 || idx[axis] == s[axis] - 1)
                        continue;
                    int lo[3] = {i, j, k};
                    int hi[3] = {i, j, k};
                    lo[c] -= 1;
                    hi[c] += 1;
                    double ul, uh;
                    if (c == axis) {
                        ul = u(lo[0], lo[1], lo[2]);
                        uh = u(hi[0], hi[1], hi[2]);
                    } else {
                        ul = ghosted(u, c, lo, BcKind::dirichlet);
                        uh = ghosted(u, c, hi, BcKind::dirichlet);
                    }
                    out(i, j, k) += (uh - 2.0 * u(i, j, k) + ul) * inv_h2;
                }
    }
    return out;
}

} // namespace slc
