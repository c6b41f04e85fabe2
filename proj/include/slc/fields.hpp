#pragma once

#include "slc/array.hpp"
#include "slc/grid.hpp"

#include <array>
#include <functional>
#include <vector>

namespace slc {

/// Velocity on the staggered layout: component c on the faces normal to axis c.
/// The boundary faces carry the normal trace and are zero for admissible fields.
struct VectorField {
    std::vector<Array3> c;

    static VectorField zeros(const Grid& g);
    int n_dim() const { return static_cast<int>(c.size()); }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
    void axpy(double s, const VectorField& o);
    bool operator==(const VectorField& o) const = default;
};

/// Three cell-centred components, whatever the spatial dimension.
struct DirectorField {
    std::array<Array3, 3> c;

    static DirectorField zeros(const Grid& g);
    static DirectorField constant(const Grid& g, std::array<double, 3> value);

    DirectorField& operator+=(const DirectorField& o);
    DirectorField& operator-=(const DirectorField& o);
    DirectorField& operator*=(double s);
    void axpy(double s, const DirectorField& o);
    bool operator==(const DirectorField& o) const = default;
};

struct PressureField {
    Array3 p;
};

struct State {
    VectorField v;
    DirectorField d;
    double t = 0.0;

    static State zeros(const Grid& g);

    State& operator+=(const State& o);
    State& operator-=(const State& o);
    State& operator*=(double s);
    void axpy(double s, const State& o);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);
DirectorField operator+(DirectorField a, const DirectorField& b);
DirectorField operator-(DirectorField a, const DirectorField& b);
DirectorField operator*(double s, DirectorField a);
State operator-(State a, const State& b);

bool all_finite(const State& s);

using ScalarFunction = std::function<double(double, double, double)>;

/// Samples f at cell centres.
Array3 sample_cell(const Grid& g, const ScalarFunction& f);
/// Samples f at the centres of the faces normal to `axis`, boundary faces included.
Array3 sample_face(const Grid& g, int axis, const ScalarFunction& f);
VectorField sample_vector(const Grid& g, const std::array<ScalarFunction, 3>& f);
DirectorField sample_director(const Grid& g, const std::array<ScalarFunction, 3>& f);

// Inner products use cell-volume weights; boundary faces count half (trapezoid in the normal direction).
double inner(const Grid& g, const Array3& a, const Array3& b);
double inner(const Grid& g, const VectorField& a, const VectorField& b);
double inner(const Grid& g, const DirectorField& a, const DirectorField& b);
double face_inner(const Grid& g, int axis, const Array3& a, const Array3& b);

double l2_norm(const Grid& g, const Array3& cell);
double l4_norm(const Grid& g, const Array3& cell);
double linf_norm(const Grid& g, const Array3& cell);
double l2_norm(const Grid& g, const VectorField& v);
/// Component-wise: (sum_c int |v_c|^4)^{1/4}, since the components are not collocated.
double l4_norm(const Grid& g, const VectorField& v);
double linf_norm(const Grid& g, const VectorField& v);
double l2_norm(const Grid& g, const DirectorField& d);
/// Pointwise Euclidean magnitude of the three components.
double l4_norm(const Grid& g, const DirectorField& d);
double linf_norm(const Grid& g, const DirectorField& d);

/// One-sided-closed fourth-order first derivative at cell centres along `axis`
/// (second order when the axis has fewer than 8 cells).  No boundary condition is imposed.
Array3 derivative(const Grid& g, const Array3& u, int axis);

/// Sobolev norm: sum over multi-indices |alpha| <= order of ||D^alpha u||^2, then sqrt.
double h_norm(const Grid& g, const Array3& u, int order);
double h_norm(const Grid& g, const DirectorField& d, int order);

/// ||A^{1/2} v|| from the sine multipliers (the discrete enstrophy).
double a_half_norm(const Grid& g, const VectorField& v);
/// ||A v|| = ||Pi Delta v||.
double a_norm(const Grid& g, const VectorField& v);
/// ||grad d|| for the Neumann Laplacian, from cosine multipliers.
double grad_norm(const Grid& g, const DirectorField& d);
/// ||Delta d|| from cosine multipliers.
double laplacian_norm(const Grid& g, const DirectorField& d);
/// X_alpha norm: weights (1 + lambda_k)^{1 + 2 alpha} on cosine coefficients.
double x_alpha_norm(const Grid& g, const DirectorField& d, double alpha);

/// H = HH x X_0.
double h_space_norm(const Grid& g, const State& s);
/// V-norm: ||A^{1/2} v||^2 + h_norm(d, 2)^2.
double v_norm(const Grid& g, const State& s);
/// E-norm: ||A v||^2 + ||(I + A_hat)^{3/2} d||^2.
double e_norm(const Grid& g, const State& s);

struct XtAccumulator {
    double sup_v_norm_sq = 0.0;
    double integral_e_norm_sq = 0.0;

    double value_sq() const { return sup_v_norm_sq + integral_e_norm_sq; }
};

XtAccumulator xt_update(XtAccumulator acc, const Grid& g, const State& s, double dt);
XtAccumulator xt_update(XtAccumulator acc, double v_norm_value, double e_norm_value, double dt);

} // namespace slc
