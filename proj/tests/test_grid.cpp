#include "support.hpp"

#include "slc/errors.hpp"
#include "slc/grid.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <algorithm>
#include <numbers>

using namespace slc;
using slc::test::Rng;

namespace {

constexpr double pi = std::numbers::pi;

/// Dense matrix of u -> laplacian(u) acting on cell arrays.
Eigen::MatrixXd laplacian_matrix(const Grid& g, BcKind bc)
{
    const auto n = static_cast<Eigen::Index>(g.cell_count());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Array3 e(g.cell_shape());
        e[static_cast<std::size_t>(j)] = 1.0;
        Array3 col = laplacian(g, e, bc);
        for (Eigen::Index i = 0; i < n; ++i)
            m(i, j) = col[static_cast<std::size_t>(i)];
    }
    return m;
}

std::vector<double> sorted_eigenvalues_of_negative(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-m);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Normalized 1D basis vector sampled at the given positions.
std::vector<double> basis_vector(int count, const std::function<double(int)>& f)
{
    std::vector<double> b(static_cast<std::size_t>(count));
    double s = 0.0;
    for (int i = 0; i < count; ++i) {
        b[static_cast<std::size_t>(i)] = f(i);
        s += f(i) * f(i);
    }
    for (auto& v : b)
        v /= std::sqrt(s);
    return b;
}

/// Direct-summation separable transform of a 2D array.
Array3 direct_transform_2d(const Array3& u, const std::vector<std::vector<double>>& bx,
                           const std::vector<std::vector<double>>& by, int offset_x)
{
    const int kx = static_cast<int>(bx.size()), ky = static_cast<int>(by.size());
    Array3 out({kx, ky, 1});
    for (int q = 0; q < ky; ++q)
        for (int p = 0; p < kx; ++p) {
            double s = 0.0;
            for (int j = 0; j < static_cast<int>(by[0].size()); ++j)
                for (int i = 0; i < static_cast<int>(bx[0].size()); ++i)
                    s += u(i + offset_x, j, 0) * bx[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)] *
                         by[static_cast<std::size_t>(q)][static_cast<std::size_t>(j)];
            out(p, q, 0) = s;
        }
    return out;
}

std::vector<std::vector<double>> cosine_basis(int n)
{
    std::vector<std::vector<double>> b;
    for (int k = 0; k < n; ++k)
        b.push_back(basis_vector(n, [=](int i) { return std::cos(pi * k * (i + 0.5) / n); }));
    return b;
}

std::vector<std::vector<double>> sine_cell_basis(int n)
{
    std::vector<std::vector<double>> b;
    for (int k = 0; k < n; ++k)
        b.push_back(basis_vector(n, [=](int i) { return std::sin(pi * (k + 1) * (i + 0.5) / n); }));
    return b;
}

std::vector<std::vector<double>> sine_node_basis(int n)
{
    std::vector<std::vector<double>> b;
    for (int k = 0; k < n - 1; ++k)
        b.push_back(basis_vector(n - 1, [=](int i) { return std::sin(pi * (k + 1) * (i + 1) / n); }));
    return b;
}

} // namespace

TEST_SUITE("grid")
{
    TEST_CASE("construction arithmetic")
    {
        Grid g = build_grid(2, {64, 64, 1}, {1.0, 1.0, 0.0});
        CHECK(g.spacing(0) == doctest::Approx(1.0 / 64).epsilon(1e-15));
        CHECK(g.spacing(1) == doctest::Approx(1.0 / 64).epsilon(1e-15));
        CHECK(g.cell_count() == 64u * 64u);

        Grid g3 = build_grid(3, {8, 8, 8}, {1.0, 1.0, 1.0});
        CHECK(g3.cell_count() == 512u);
        CHECK(g3.cell_volume() == doctest::Approx(1.0 / 512));
    }

    TEST_CASE("invalid grids are configuration errors")
    {
        CHECK_THROWS_AS(build_grid(2, {6, 8, 1}, {1.0, 1.0, 0.0}), ConfigError);
        CHECK_THROWS_AS(build_grid(2, {2, 8, 1}, {1.0, 1.0, 0.0}), ConfigError);
        CHECK_THROWS_AS(build_grid(4, {8, 8, 8}, {1.0, 1.0, 1.0}), ConfigError);
        CHECK_THROWS_AS(build_grid(1, {8, 8, 8}, {1.0, 1.0, 1.0}), ConfigError);
        CHECK_THROWS_AS(build_grid(2, {8, 8, 1}, {1.0, 0.0, 0.0}), ConfigError);
        CHECK_THROWS_AS(build_grid(3, {8, 8, 8}, {1.0, 1.0, -1.0}), ConfigError);
        CHECK_THROWS_AS(parse_bc_kind("periodic"), ConfigError);
        CHECK(parse_bc_kind("neumann") == BcKind::neumann);
        CHECK(parse_bc_kind("dirichlet") == BcKind::dirichlet);
    }

    TEST_CASE("spectrum structure")
    {
        for (int n : {4, 8, 16}) {
            Grid g = build_grid(2, {n, 2 * n, 1}, {1.0, 2.0, 0.0});
            const auto& sp = g.spectrum();
            CHECK(std::is_sorted(sp.neumann_eigenvalues.begin(), sp.neumann_eigenvalues.end()));
            CHECK(std::is_sorted(sp.dirichlet_eigenvalues.begin(), sp.dirichlet_eigenvalues.end()));
            CHECK(sp.neumann_eigenvalues[0] == 0.0);
            CHECK(sp.neumann_eigenvalues[1] > 0.0);
            CHECK(std::count(sp.neumann_eigenvalues.begin(), sp.neumann_eigenvalues.end(), 0.0) == 1);
            CHECK(sp.dirichlet_eigenvalues[0] > 0.0);
        }
    }

    TEST_CASE("neumann spectrum equals the matrix eigendecomposition")
    {
        for (auto cells : {std::array<int, 3>{4, 4, 1}, std::array<int, 3>{8, 4, 1}, std::array<int, 3>{16, 16, 1}}) {
            Grid g = build_grid(2, cells, {pi, 1.5, 0.0});
            auto ev = sorted_eigenvalues_of_negative(laplacian_matrix(g, BcKind::neumann));
            const auto& sp = g.spectrum().neumann_eigenvalues;
            REQUIRE(ev.size() == sp.size());
            for (std::size_t i = 0; i < ev.size(); ++i)
                CHECK(std::abs(ev[i] - sp[i]) <= 1e-10 * std::max(1.0, sp[i]));
        }
        Grid g3 = build_grid(3, {4, 4, 8}, {1.0, 1.0, 2.0});
        auto ev = sorted_eigenvalues_of_negative(laplacian_matrix(g3, BcKind::neumann));
        const auto& sp = g3.spectrum().neumann_eigenvalues;
        for (std::size_t i = 0; i < ev.size(); ++i)
            CHECK(std::abs(ev[i] - sp[i]) <= 1e-10 * std::max(1.0, sp[i]));
    }

    TEST_CASE("dirichlet spectrum equals the matrix eigendecomposition")
    {
        Grid g = build_grid(2, {8, 16, 1}, {1.0, 1.0, 0.0});
        auto ev = sorted_eigenvalues_of_negative(laplacian_matrix(g, BcKind::dirichlet));
        const auto& sp = g.spectrum().dirichlet_eigenvalues;
        REQUIRE(ev.size() == sp.size());
        for (std::size_t i = 0; i < ev.size(); ++i)
            CHECK(std::abs(ev[i] - sp[i]) <= 1e-10 * sp[i]);
    }

    TEST_CASE("pi-square 4x4 grid: zero mode and the first cosine mode")
    {
        Grid g = build_grid(2, {4, 4, 1}, {pi, pi, 0.0});
        const auto& sp = g.spectrum().neumann_eigenvalues;
        CHECK(sp[0] == 0.0);
        // Mode (1,0) on 4 cells: 4/h^2 sin^2(pi/8), the discrete counterpart of (pi/L)^2 = 1.
        const double h = pi / 4;
        const double discrete = 4.0 / (h * h) * std::pow(std::sin(pi / 8), 2);
        CHECK(sp[1] == doctest::Approx(discrete).epsilon(1e-13));
        CHECK(sp[1] == doctest::Approx(0.949641).epsilon(1e-5));
        // Refinement approaches the continuum value 1.
        Grid fine = build_grid(2, {256, 256, 1}, {pi, pi, 0.0});
        CHECK(std::abs(fine.spectrum().neumann_eigenvalues[1] - 1.0) < 1e-4);
    }

    TEST_CASE("cosine transform agrees with direct summation on 8x8")
    {
        Grid g = build_grid(2, {8, 8, 1}, {1.0, 1.0, 0.0});
        Rng rng(11);
        Array3 u = test::random_array(g.cell_shape(), rng);
        Array3 oracle = direct_transform_2d(u, cosine_basis(8), cosine_basis(8), 0);
        Array3 c = g.cosine_transform(u, Direction::forward);
        for (std::size_t n = 0; n < c.size(); ++n)
            CHECK(std::abs(c[n] - oracle[n]) < 1e-13);
        Array3 back = g.cosine_transform(c, Direction::inverse);
        CHECK(max_abs(back - u) < 1e-12);
    }

    TEST_CASE("sine transform agrees with direct summation on 8x8")
    {
        Grid g = build_grid(2, {8, 8, 1}, {1.0, 1.0, 0.0});
        Rng rng(12);
        Array3 u = test::random_array(g.cell_shape(), rng);
        Array3 oracle = direct_transform_2d(u, sine_cell_basis(8), sine_cell_basis(8), 0);
        Array3 c = g.sine_transform(u, Direction::forward);
        for (std::size_t n = 0; n < c.size(); ++n)
            CHECK(std::abs(c[n] - oracle[n]) < 1e-13);
        CHECK(max_abs(g.sine_transform(c, Direction::inverse) - u) < 1e-12);
    }

    TEST_CASE("face sine transform agrees with direct summation on 8x8")
    {
        Grid g = build_grid(2, {8, 8, 1}, {1.0, 1.0, 0.0});
        Rng rng(13);
        Array3 u = test::random_array(g.face_shape(0), rng);
        for (int j = 0; j < 8; ++j)
            u(0, j, 0) = u(8, j, 0) = 0.0;
        Array3 oracle = direct_transform_2d(u, sine_node_basis(8), sine_cell_basis(8), 1);
        Array3 c = g.face_sine_transform(0, u, Direction::forward);
        REQUIRE(c.shape() == Shape{7, 8, 1});
        for (std::size_t n = 0; n < c.size(); ++n)
            CHECK(std::abs(c[n] - oracle[n]) < 1e-13);
        CHECK(max_abs(g.face_sine_transform(0, c, Direction::inverse) - u) < 1e-12);
    }

    TEST_CASE("round trips and Parseval on random fields")
    {
        Rng rng(14);
        for (auto cells : {std::array<int, 3>{16, 32, 1}, std::array<int, 3>{8, 8, 16}}) {
            const int dim = cells[2] == 1 ? 2 : 3;
            Grid g = build_grid(dim, cells, {1.0, 0.5, dim == 3 ? 2.0 : 0.0});
            Array3 u = test::random_array(g.cell_shape(), rng);
            for (auto dir_fn : {&Grid::cosine_transform, &Grid::sine_transform}) {
                Array3 c = (g.*dir_fn)(u, Direction::forward);
                CHECK(max_abs((g.*dir_fn)(c, Direction::inverse) - u) < 1e-12);
                CHECK(test::rel_diff(dot(c, c), dot(u, u)) < 1e-12);
            }
            for (int a = 0; a < dim; ++a) {
                Array3 f = test::random_array(g.face_shape(a), rng);
                Array3 c = g.face_sine_transform(a, f, Direction::forward);
                Array3 back = g.face_sine_transform(a, c, Direction::inverse);
                // Boundary faces come back as zero; interior faces exactly.
                Array3 interior = f;
                const Shape s = f.shape();
                for (int k = 0; k < s[2]; ++k)
                    for (int j = 0; j < s[1]; ++j)
                        for (int i = 0; i < s[0]; ++i) {
                            const int idx[3] = {i, j, k};
                            if (idx[a] == 0 || idx[a] == s[a] - 1)
                                interior(i, j, k) = 0.0;
                        }
                CHECK(max_abs(back - interior) < 1e-12);
                CHECK(test::rel_diff(dot(c, c), dot(interior, interior)) < 1e-12);
            }
        }
    }

    TEST_CASE("eigenfunctions map to single coefficients")
    {
        Grid g = build_grid(2, {16, 8, 1}, {2.0, 1.0, 0.0});
        Array3 one(g.cell_shape(), 3.0);
        Array3 c = g.cosine_transform(one, Direction::forward);
        CHECK(std::abs(c[0]) > 1.0);
        CHECK(max_abs(c - [&] { Array3 z(c.shape()); z[0] = c[0]; return z; }()) < 1e-13);

        Array3 cx(g.cell_shape());
        Array3 sx(g.cell_shape());
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 16; ++i) {
                cx(i, j, 0) = std::cos(pi * g.center(0, i) / 2.0);
                sx(i, j, 0) = std::sin(pi * g.center(0, i) / 2.0) * std::sin(pi * g.center(1, j));
            }
        Array3 cc = g.cosine_transform(cx, Direction::forward);
        for (std::size_t n = 0; n < cc.size(); ++n)
            CHECK(std::abs(cc[n]) < (n == 1 ? 1e300 : 1e-13));
        CHECK(std::abs(cc[1]) > 1.0);
        Array3 sc = g.sine_transform(sx, Direction::forward);
        for (std::size_t n = 1; n < sc.size(); ++n)
            CHECK(std::abs(sc[n]) < 1e-13);
        CHECK(std::abs(sc[0]) > 1.0);

        Array3 zero(g.cell_shape());
        CHECK(max_abs(g.sine_transform(zero, Direction::forward)) == 0.0);
    }

    TEST_CASE("shape mismatch is a dimension error")
    {
        Grid g = build_grid(2, {8, 8, 1}, {1.0, 1.0, 0.0});
        Array3 wrong({8, 4, 1});
        CHECK_THROWS_AS(g.cosine_transform(wrong, Direction::forward), DimensionError);
        CHECK_THROWS_AS(g.sine_transform(wrong, Direction::inverse), DimensionError);
        CHECK_THROWS_AS(g.face_sine_transform(0, wrong, Direction::forward), DimensionError);
        CHECK_THROWS_AS(laplacian(g, wrong, BcKind::neumann), DimensionError);
    }

    TEST_CASE("difference operators")
    {
        Grid g = build_grid(2, {16, 8, 1}, {1.0, 0.5, 0.0});
        Array3 c(g.cell_shape(), 2.5);
        for (const auto& f : gradient(g, c, BcKind::neumann))
            CHECK(max_abs(f) == 0.0);

        // div(grad cos(pi x)) has the discrete eigenvalue 2(1 - cos(pi h))/h^2.
        Array3 u(g.cell_shape());
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 16; ++i)
                u(i, j, 0) = std::cos(pi * g.center(0, i));
        Array3 lap = divergence(g, gradient(g, u, BcKind::neumann));
        const double h = g.spacing(0);
        const double lam = 2.0 * (1.0 - std::cos(pi * h)) / (h * h);
        CHECK(max_abs(lap + lam * u) < 1e-12 * lam);
        CHECK(std::abs(lam - pi * pi) / (pi * pi) < h * h * pi * pi / 10.0);

        // Linear data: zero in the interior.
        Array3 lin(g.cell_shape());
        for (int j = 0; j < 8; ++j)
            for (int i = 0; i < 16; ++i)
                lin(i, j, 0) = 3.0 * g.center(0, i) - 1.0;
        Array3 ll = laplacian(g, lin, BcKind::neumann);
        for (int j = 0; j < 8; ++j)
            for (int i = 1; i < 15; ++i)
                CHECK(std::abs(ll(i, j, 0)) < 1e-9);
    }

    TEST_CASE("divergence of gradient is the compact laplacian for both boundary kinds")
    {
        Rng rng(15);
        for (int dim : {2, 3}) {
            Grid g = build_grid(dim, {8, 16, dim == 3 ? 4 : 1}, {1.0, 2.0, dim == 3 ? 0.5 : 0.0});
            Array3 u = test::random_array(g.cell_shape(), rng);
            for (BcKind bc : {BcKind::neumann, BcKind::dirichlet}) {
                Array3 a = divergence(g, gradient(g, u, bc));
                Array3 b = laplacian(g, u, bc);
                CHECK(max_abs(a - b) <= 1e-12 * max_abs(b));
            }
        }
    }

    TEST_CASE("laplacian sign properties on random fields")
    {
        Rng rng(16);
        Grid g = build_grid(2, {16, 16, 1}, {1.0, 1.0, 0.0});
        for (int trial = 0; trial < 20; ++trial) {
            Array3 u = test::random_array(g.cell_shape(), rng);
            CHECK(dot(laplacian(g, u, BcKind::neumann), u) < 0.0);
            CHECK(dot(laplacian(g, u, BcKind::dirichlet), u) < 0.0);
        }
        Array3 c(g.cell_shape(), -1.25);
        CHECK(std::abs(dot(laplacian(g, c, BcKind::neumann), c)) < 1e-20);
        CHECK(dot(laplacian(g, c, BcKind::dirichlet), c) < 0.0);
    }

    TEST_CASE("summation by parts")
    {
        Rng rng(17);
        for (int dim : {2, 3}) {
            Grid g = build_grid(dim, {16, 8, dim == 3 ? 8 : 1}, {1.0, 1.0, dim == 3 ? 1.0 : 0.0});
            for (int trial = 0; trial < 10; ++trial) {
                Array3 u = test::random_array(g.cell_shape(), rng);
                std::vector<Array3> f;
                for (int a = 0; a < dim; ++a) {
                    Array3 fa = test::random_array(g.face_shape(a), rng);
                    const Shape s = fa.shape();
                    for (int k = 0; k < s[2]; ++k)
                        for (int j = 0; j < s[1]; ++j)
                            for (int i = 0; i < s[0]; ++i) {
                                const int idx[3] = {i, j, k};
                                if (idx[a] == 0 || idx[a] == s[a] - 1)
                                    fa(i, j, k) = 0.0;
                            }
                    f.push_back(fa);
                }
                auto grad = gradient(g, u, BcKind::neumann);
                double lhs = 0.0;
                for (int a = 0; a < dim; ++a)
                    lhs += dot(grad[static_cast<std::size_t>(a)], f[static_cast<std::size_t>(a)]);
                double rhs = -dot(u, divergence(g, f));
                CHECK(test::rel_diff(lhs, rhs) < 1e-12);
            }
        }
    }
}
