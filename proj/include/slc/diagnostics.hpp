#pragma once

#include "slc/fields.hpp"
#include "slc/operators.hpp"

#include <vector>

namespace slc {

struct TrajectoryRecord;

struct EnergyRecord {
    double t = 0.0;
    double e_q = 0.0;
    double psi = 0.0;
    double phi_weight = 1.0;
    double max_gap = 0.0;
    double diss_grad_v = 0.0; ///< ||A^{1/2} v||^2
    double diss_grad_d = 0.0; ///< ||grad d||^2
    double diss_lap_d = 0.0;  ///< ||Delta d||^2
};

/// Cell-volume-weighted sum of ((|d|^2 - 1)_+)^2.
double max_principle_gap(const Grid& g, const DirectorField& d);
/// ||v||^q + ||d||^q + ||grad d||^q.
double energy_q(const Grid& g, const State& s, double q);
/// ||Delta d - f(d)||^2 with the 1/eps^2 penalty.
double psi_functional(const Grid& g, const DirectorField& d, double eps);
/// dt * c_phi * ||v||^2 * ||A^{1/2} v||^{2n/(4-n)}.
double phi_increment(const Grid& g, const State& s, double dt, int n_dim, double c_phi = 1.0);

EnergyRecord energy_record(const Model& m, const State& s, double q, double phi_weight);

/// ||F(y1) - F(y2)||_H over the local-Lipschitz bracket with alpha = n/4.
double lipschitz_probe_F(const Model& m, const State& y1, const State& y2);

struct EnergyBoundFit {
    double c_growth = 0.0;
    int violation_count = 0;
    double e0 = 0.0;
    std::vector<double> times;
    std::vector<double> mean_energy;
};

/// Smallest C >= 0 with mean e_q(t) <= E0 e^{C t} for recorded t >= fit_start * horizon.
/// Violations count recorded times (all of them, including the early ones) above the bound.
EnergyBoundFit ensemble_energy_bound(const std::vector<TrajectoryRecord>& records, double fit_start = 0.25);

/// ||u||_{L4} / (||u||^{1-a} ||grad u||^a) for a field vanishing on the walls.
double gn_l4_ratio(const Grid& g, const Array3& u);
/// ||u||_inf / (||u||_{L4}^{1-a} ||grad u||_{L4}^a).
double gn_linf_ratio(const Grid& g, const Array3& u);
/// sup |f'| over the closed unit ball, (2/eps^2).
double penalty_slope_bound(double eps);
/// h_norm(d,2)^2 / (Psi(d) + 2 c ||d||^2).
double regularity_ratio(const Grid& g, const DirectorField& d, double eps);

} // namespace slc
