#pragma once

#include "slc/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace slc {

struct ProbeResult {
    std::string name;
    double measured = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool passed = false;
    std::string detail;
};

/// Worst relative residuals over random smooth samples on one grid.
struct SkewProbe {
    double b1 = 0.0;        ///< |<B1(u,v),v>| / (||u|| ||grad v|| ||v||)
    double b2 = 0.0;        ///< |<B2(v,d),d>| / (||v|| ||grad d|| ||d||)
    double idempotence = 0.0;   ///< ||Pi Pi u - Pi u|| / ||u||
    double annihilation = 0.0;  ///< ||Pi grad p|| / ||grad p||
    double helmholtz = 0.0;     ///< ||Pi(grad p + curl s) - curl s|| / ||grad p + curl s||
};
SkewProbe skew_probe(int cells, int samples, std::uint64_t seed);

/// Duality of the director advection and the stress term on fixed smooth fields.
/// gaps: |<B2(v,d), Delta d> - <M(d,d), v>| with Delta d the Laplacian of the smooth
/// field, so the gap is the discretization error of the discrete pairing.
/// discrete_gaps: the same with the grid Laplacian, relative to |<M(d,d), v>|; the
/// staggered operators satisfy it exactly, so this is round-off.
struct DualityProbe {
    std::vector<int> cells;
    std::vector<double> gaps;
    std::vector<double> discrete_gaps;
    double order = 0.0; ///< least-squares slope of -log gap against log cells
};
DualityProbe duality_probe(const std::vector<int>& cells);

/// Largest ratio over a batch of random fields, one entry per grid.
struct RefinementProbe {
    std::vector<int> cells;
    std::vector<double> constants;
    double spread = 0.0; ///< max / min over the grids
};
RefinementProbe gn_l4_probe(const std::vector<int>& cells, int samples, std::uint64_t seed);
RefinementProbe gn_linf_probe(const std::vector<int>& cells, int samples, std::uint64_t seed);
RefinementProbe regularity_probe(const std::vector<int>& cells, int samples, std::uint64_t seed, double eps);

/// Largest Lipschitz ratio per amplitude on a fixed grid.
struct AmplitudeProbe {
    std::vector<double> amplitudes;
    std::vector<double> constants;
    double spread = 0.0;
};
AmplitudeProbe lipschitz_probe(const SimConfig& base, const std::vector<double>& amplitudes, int pairs,
                               std::uint64_t seed);

/// Picard contraction against the window length.  The rate of one solve is the
/// geometric mean of its successive distance ratios; ratios[i] is the geometric
/// mean of that rate over the paths of `seeds`, first_ratios[i] likewise for the
/// first sweep alone.  iterations and converged hold the worst seed.
struct ContractionProbe {
    std::vector<double> windows;
    std::vector<double> ratios;
    std::vector<double> first_ratios;
    std::vector<int> iterations;
    std::vector<bool> converged;
    double slope = 0.0;       ///< least-squares slope of log ratio against log window
    double first_slope = 0.0; ///< same for first_ratios
};
ContractionProbe contraction_probe(const SimConfig& config, const std::vector<double>& windows,
                                   const std::vector<std::uint64_t>& seeds);

/// Terminal v_norm with n_trunc and 2 n_trunc on one window.
struct InertnessProbe {
    double v_norm_base = 0.0;
    double v_norm_doubled = 0.0;
    bool cutoff_active = false;
};
InertnessProbe inertness_probe(const SimConfig& config, std::uint64_t seed);

/// Director-only rotation: velocity frozen at zero, penalty, nonlinearity and
/// diffusion off, uniform unit director perpendicular to h.  drift[i] estimates
/// E(|d_T(x*)| - 1) / T at the cell of largest |h|, on the path refined i times.
/// The estimator subtracts the regression on sum_i (dW_i^2 / dt - 1), a martingale
/// with mean exactly zero, which removes the leading-order path noise.
struct RotationProbe {
    std::vector<double> dts;
    std::vector<double> drift;
    std::vector<double> std_error;
    double slope = 0.0; ///< least-squares slope of log |drift| against log dt
};
SimConfig rotation_config(double field_amplitude, double horizon, double dt);
RotationProbe rotation_probe(const SimConfig& config, int levels, int paths, std::uint64_t seed);

/// EM and Picard (window = 8 dt) on the same path refined 0..levels-1 times.
struct AgreementProbe {
    std::vector<double> dts;
    std::vector<double> em_v_norm;
    std::vector<double> picard_v_norm;
    std::vector<double> rel_diff;
    std::vector<std::string> picard_status;
};
SimConfig agreement_config();
AgreementProbe agreement_probe(const SimConfig& config, int levels, std::uint64_t seed);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// The probe suite with its pass bands.
std::vector<ProbeResult> run_probes(const SimConfig& config);
std::string probes_json(const std::vector<ProbeResult>& results);

} // namespace slc
