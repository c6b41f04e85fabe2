#pragma once

#include "slc/array.hpp"

#include <array>
#include <memory>
#include <string_view>
#include <vector>

namespace slc {

enum class BcKind { dirichlet, neumann };

/// Parses "dirichlet" / "neumann"; anything else is a ConfigError.
BcKind parse_bc_kind(std::string_view name);

enum class Direction { forward, inverse };

/// 1D bases used along one axis of a transform.
///   cosine     DCT-II on cell centres, diagonalizes the reflected (Neumann) stencil
///   sine_cell  DST-II on cell centres, diagonalizes the antireflected (Dirichlet) stencil
///   sine_node  DST-I on the n-1 interior faces, Dirichlet values pinned on the two boundary faces
enum class AxisBasis { cosine, sine_cell, sine_node };

/**
 * Eigenvalues of the discrete negative Laplacians, per axis and flattened.
 * The per-axis tables are indexed like the transform coefficients.
 */
struct Spectrum {
    std::array<std::vector<double>, 3> neumann_axis;
    std::array<std::vector<double>, 3> dirichlet_axis;

    std::vector<double> neumann_eigenvalues;   ///< sorted ascending, starts with the single 0
    std::vector<double> dirichlet_eigenvalues; ///< sorted ascending, all positive
};

/**
 * Uniform cell-centred grid on [0,L_x]x[0,L_y](x[0,L_z]).
 *
 * Scalars and director components live at cell centres.  Velocity component c
 * lives on the faces normal to axis c (staggered layout): its array has
 * n_c + 1 entries along axis c, including the two boundary faces.
 *
 * Transforms are orthonormal: sum of squares is preserved exactly, so
 * physical L2 norms are cell_volume() times the coefficient sum of squares.
 * Grid is immutable and cheap to copy; transform plans are shared.
 */
class Grid {
public:
    Grid(int n_dim, std::array<int, 3> cells, std::array<double, 3> lengths);

    int n_dim() const { return n_dim_; }
    int cells(int axis) const { return cells_[axis]; }
    double length(int axis) const { return lengths_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    const std::array<int, 3>& cells() const { return cells_; }
    const std::array<double, 3>& lengths() const { return lengths_; }
    std::size_t cell_count() const;
    double cell_volume() const;
    double measure() const;

    Shape cell_shape() const;
    Shape face_shape(int axis) const;
    /// Stream-function nodes: cell corners in x,y; cell centres in z.
    Shape node_shape() const;

    double center(int axis, int i) const { return (i + 0.5) * spacing_[axis]; }
    double face(int axis, int i) const { return i * spacing_[axis]; }

    const Spectrum& spectrum() const;

    Array3 cosine_transform(const Array3& in, Direction dir) const;
    Array3 sine_transform(const Array3& in, Direction dir) const;

    /// Transform of a face array for velocity component `axis`: DST-I across the
    /// interior faces along `axis`, DST-II along the others.  Forward drops the
    /// boundary faces; inverse restores them as zero.
    Array3 face_sine_transform(int axis, const Array3& in, Direction dir) const;

    /// Eigenvalues in coefficient order for the three transform families.
    const std::vector<double>& neumann_modes() const;
    const std::vector<double>& dirichlet_modes() const;
    const std::vector<double>& face_modes(int axis) const;

    void require_cell(const Array3& a) const;
    void require_face(int axis, const Array3& a) const;

    bool operator==(const Grid& other) const;

    struct Impl;

private:
    int n_dim_;
    std::array<int, 3> cells_;
    std::array<double, 3> lengths_;
    std::array<double, 3> spacing_;
    std::shared_ptr<const Impl> impl_;
};

Grid build_grid(int n_dim, std::array<int, 3> cells, std::array<double, 3> lengths);

/// 1D eigenvalue of the negative second-difference in the given basis, index k.
double axis_eigenvalue(AxisBasis basis, int k, int n, double h);

/// Face gradient of a cell scalar.  Boundary faces: 0 for Neumann, 2u/h (antireflected ghost) for Dirichlet.
std::vector<Array3> gradient(const Grid& g, const Array3& u, BcKind bc);
/// Cell divergence of face arrays.
Array3 divergence(const Grid& g, const std::vector<Array3>& f);
/// Compact cell-centred Laplacian with reflected or antireflected ghosts.
Array3 laplacian(const Grid& g, const Array3& u, BcKind bc);
/// No-slip Laplacian of velocity component `axis`: Dirichlet at boundary faces along
/// `axis`, antireflected ghosts across the tangential walls.
Array3 face_laplacian(const Grid& g, int axis, const Array3& u);

} // namespace slc
