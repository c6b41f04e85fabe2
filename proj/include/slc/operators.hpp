#pragma once

#include "slc/fields.hpp"
#include "slc/grid.hpp"

#include <string>
#include <vector>

namespace slc {

/// Helmholtz split on the staggered grid.  The normal trace is zeroed, the Neumann
/// pressure problem is solved with cosine transforms (zero mode pinned to 0), and
/// the pressure gradient is subtracted.  Optionally returns the pressure.
VectorField leray_project(const Grid& g, const VectorField& u, PressureField* pressure = nullptr);

/// Exact exp(-t A_hat) on cosine coefficients of each director component.
DirectorField semigroup_director(const Grid& g, double t, const DirectorField& d);

/// One implicit Euler step of the no-slip heat equation, then leray_project.
VectorField semigroup_velocity_step(const Grid& g, double dt, const VectorField& v);

/// Discrete (u.grad) w in flux form with centred interpolation; skew in w when div u = 0.
VectorField b1(const Grid& g, const VectorField& u, const VectorField& w);
/// Discrete (v.grad) d for each director component, same flux form.
DirectorField b2(const Grid& g, const VectorField& v, const DirectorField& d);

/// Pi[div(grad d1 (x) grad d2)], divergence taken over the second index.
VectorField m_term(const Grid& g, const DirectorField& d1, const DirectorField& d2);
/// Pi[sum_k Lap d^k grad d^k + grad(|grad d|^2 / 2)]; projection removes the gradient part.
VectorField m_term_expanded(const Grid& g, const DirectorField& d);

/// (1/eps^2)(|d|^2 - 1) d inside the closed unit ball, zero outside.
DirectorField f_penalty(const DirectorField& d, double eps);

/// Pointwise d x h and (d x h) x h.
DirectorField g_cross(const DirectorField& d, const DirectorField& h);
DirectorField g2_cross(const DirectorField& d, const DirectorField& h);

struct MagneticFieldSpec {
    std::string profile = "sine_bump";
    double amplitude = 0.5;
};

/// h = H0 (sin(pi x/Lx) sin(pi y/Ly) [sin(pi z/Lz)], 0, 0) at cell centres.
DirectorField magnetic_field(const Grid& g, const MagneticFieldSpec& spec);
double magnetic_linf(const Grid& g, const DirectorField& h);
double magnetic_w13(const Grid& g, const DirectorField& h);

enum class NoiseKind { additive_trace_class, linear_multiplicative };

std::string to_string(NoiseKind kind);
NoiseKind parse_noise_kind(const std::string& name);

struct NoiseCoefficientSpec {
    NoiseKind kind = NoiseKind::additive_trace_class;
    int mode_count = 16;
    double decay_exponent = 1.5;
    double amplitude = 2000.0;
    /// Saturation level of the multiplicative gain min(||v||, gain_clip).
    double gain_clip = 1.0;
};

/// Throws ConfigError listing every violated invariant.
void validate(const NoiseCoefficientSpec& spec);

/// Discrete curl of a stream function given at node_shape() points (x,y corners,
/// z centres).  The result is exactly solenoidal; it has zero normal trace when the
/// stream function vanishes on the walls.
VectorField curl_of_stream(const Grid& g, const Array3& stream);

/**
 * Divergence-free velocity fields driven by the K1 coordinates.  psi_j is the discrete
 * curl of the stream function sin(pi x) sin(p pi x) sin(pi y) sin(q pi y) (unit box
 * coordinates), whose value and gradient vanish on the walls, so psi_j is solenoidal
 * with zero normal trace and vanishing tangential trace.  The family is Gram-Schmidt
 * orthonormalized in L2, coarsest modes first.  mu_j = ||A^{1/2} psi_j||^2.
 */
struct NoiseBasis {
    std::vector<VectorField> psi;
    std::vector<double> mu;

    static NoiseBasis build(const Grid& g, int mode_count);
};

/// Weight sigma (1 + mu_j)^{-s} of direction j.
double noise_weight(const NoiseCoefficientSpec& spec, const NoiseBasis& basis, int j);
/// sum_j sigma^2 (1 + mu_j)^{1 - 2s}: squared Hilbert-Schmidt norm into the velocity V-space.
double hs_mass(const NoiseCoefficientSpec& spec, const NoiseBasis& basis);
/// Constant in sum_j ||S(v) e_j||_V^2 <= ell5 (1 + ||v||^2).
double ell5(const NoiseCoefficientSpec& spec, const NoiseBasis& basis);
/// Lipschitz constant of v -> S(v) into J2(K1, V).
double noise_lipschitz(const NoiseCoefficientSpec& spec, const NoiseBasis& basis);
/// Multiplicative gain g(v); 1 for the additive kind.
double noise_gain(const Grid& g, const NoiseCoefficientSpec& spec, const VectorField& v);

VectorField noise_coeff(const Grid& g, const NoiseCoefficientSpec& spec, const NoiseBasis& basis,
                        const VectorField& v, const std::vector<double>& k);

/// Everything the right-hand side needs, built once per run.
struct Model {
    Grid grid;
    double eps = 1.0;
    NoiseCoefficientSpec noise;
    NoiseBasis basis;
    MagneticFieldSpec magnetic;
    DirectorField h;
    bool nonlinearity = true; ///< false drops B1, B2 and M from F
    bool penalty = true;
    bool evolve_velocity = true;
    bool director_diffusion = true;

    static Model build(const Grid& g, double eps, const NoiseCoefficientSpec& noise,
                       const MagneticFieldSpec& magnetic);
};

/// (Pi B1(v,v) + M(d); B2(v,d) + f(d)/eps^2).  The time field of the result is 0.
State assemble_F(const Model& m, const State& y);
/// (0; -G^2(d)/2).
State assemble_L(const Model& m, const State& y);
/// (S(v) k; G(d) dW2).
State assemble_G(const Model& m, const State& y, const std::vector<double>& k, double dw2);

} // namespace slc
