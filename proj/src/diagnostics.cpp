#include "slc/diagnostics.hpp"
#include "slc/errors.hpp"
#include "slc/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slc {

namespace {

/// Neumann Laplacian of each component through the cosine multipliers.
DirectorField spectral_laplacian(const Grid& g, const DirectorField& d)
{
    const auto& lam = g.neumann_modes();
    DirectorField out;
    for (int k = 0; k < 3; ++k) {
        Array3 c = g.cosine_transform(d.c[k], Direction::forward);
        for (std::size_t n = 0; n < c.size(); ++n)
            c[n] *= -lam[n];
        out.c[k] = g.cosine_transform(c, Direction::inverse);
    }
    return out;
}

double gn_exponent(const Grid& g) { return g.n_dim() / 4.0; }

VectorField dirichlet_gradient(const Grid& g, const Array3& u)
{
    return VectorField{gradient(g, u, BcKind::dirichlet)};
}

} // namespace

double max_principle_gap(const Grid& g, const DirectorField& d)
{
    double s = 0.0;
    for (std::size_t n = 0; n < d.c[0].size(); ++n) {
        double m2 = d.c[0][n] * d.c[0][n] + d.c[1][n] * d.c[1][n] + d.c[2][n] * d.c[2][n];
        double e = std::max(m2 - 1.0, 0.0);
        s += e * e;
    }
    return s * g.cell_volume();
}

double energy_q(const Grid& g, const State& s, double q)
{
    if (!(q >= 2.0))
        throw DomainError("energy exponent q must be >= 2");
    return std::pow(l2_norm(g, s.v), q) + std::pow(l2_norm(g, s.d), q) + std::pow(grad_norm(g, s.d), q);
}

double psi_functional(const Grid& g, const DirectorField& d, double eps)
{
    DirectorField r = spectral_laplacian(g, d);
    r -= f_penalty(d, eps);
    double n = l2_norm(g, r);
    return n * n;
}

double phi_increment(const Grid& g, const State& s, double dt, int n_dim, double c_phi)
{
    if (n_dim != 2 && n_dim != 3)
        throw DomainError("phi exponent 2n/(4-n) is only used for n = 2 or 3");
    const double p = 2.0 * n_dim / (4.0 - n_dim);
    double v = l2_norm(g, s.v);
    return dt * c_phi * v * v * std::pow(a_half_norm(g, s.v), p);
}

EnergyRecord energy_record(const Model& m, const State& s, double q, double phi_weight)
{
    const Grid& g = m.grid;
    EnergyRecord r;
    r.t = s.t;
    r.e_q = energy_q(g, s, q);
    r.psi = psi_functional(g, s.d, m.eps);
    r.phi_weight = phi_weight;
    r.max_gap = max_principle_gap(g, s.d);
    double a = a_half_norm(g, s.v);
    double gd = grad_norm(g, s.d);
    double ld = laplacian_norm(g, s.d);
    r.diss_grad_v = a * a;
    r.diss_grad_d = gd * gd;
    r.diss_lap_d = ld * ld;
    return r;
}

double lipschitz_probe_F(const Model& m, const State& y1, const State& y2)
{
    const Grid& g = m.grid;
    State diff = y1 - y2;
    const double dv = v_norm(g, diff);
    if (!(dv > 0.0))
        throw DomainError("lipschitz probe needs distinct states");
    const double alpha = g.n_dim() / 4.0;
    const double de = e_norm(g, diff);
    const double bracket = std::pow(v_norm(g, y1), 1.0 - alpha) * std::pow(e_norm(g, y1), alpha) +
                           std::pow(de, alpha) * std::pow(dv, -alpha) * v_norm(g, y2) + 1.0;
    State df = assemble_F(m, y1) - assemble_F(m, y2);
    return h_space_norm(g, df) / (dv * bracket);
}

EnergyBoundFit ensemble_energy_bound(const std::vector<TrajectoryRecord>& records, double fit_start)
{
    if (records.empty())
        throw ConfigError("energy bound fit needs a nonempty ensemble");
    std::size_t rows = 0;
    for (const auto& r : records)
        rows = std::max(rows, r.rows.size());
    EnergyBoundFit fit;
    for (std::size_t i = 0; i < rows; ++i) {
        double sum = 0.0;
        int count = 0;
        double t = 0.0;
        for (const auto& r : records)
            if (i < r.rows.size()) {
                sum += r.rows[i].energy.e_q;
                t = r.rows[i].t;
                ++count;
            }
        fit.times.push_back(t);
        fit.mean_energy.push_back(sum / count);
    }
    if (rows == 0)
        return fit;
    fit.e0 = fit.mean_energy.front();
    const double horizon = fit.times.back();
    double c = 0.0;
    for (std::size_t i = 1; i < rows; ++i) {
        double t = fit.times[i];
        if (t <= 0.0 || t < fit_start * horizon)
            continue;
        if (fit.e0 > 0.0 && fit.mean_energy[i] > 0.0)
            c = std::max(c, std::log(fit.mean_energy[i] / fit.e0) / t);
        else if (fit.e0 <= 0.0 && fit.mean_energy[i] > 0.0)
            c = std::numeric_limits<double>::infinity();
    }
    fit.c_growth = c;
    for (std::size_t i = 0; i < rows; ++i) {
        double bound = fit.e0 * std::exp(c * fit.times[i]);
        if (fit.mean_energy[i] > bound * (1.0 + 1e-12))
            ++fit.violation_count;
    }
    return fit;
}

double gn_l4_ratio(const Grid& g, const Array3& u)
{
    const double a = gn_exponent(g);
    const double n2 = l2_norm(g, u);
    const double gr = l2_norm(g, dirichlet_gradient(g, u));
    return l4_norm(g, u) / (std::pow(n2, 1.0 - a) * std::pow(gr, a));
}

double gn_linf_ratio(const Grid& g, const Array3& u)
{
    const double a = gn_exponent(g);
    const double n4 = l4_norm(g, u);
    const double gr4 = l4_norm(g, dirichlet_gradient(g, u));
    return linf_norm(g, u) / (std::pow(n4, 1.0 - a) * std::pow(gr4, a));
}

double penalty_slope_bound(double eps)
{
    if (!(eps > 0.0))
        throw DomainError("eps must be positive");
    return 2.0 / (eps * eps);
}

double regularity_ratio(const Grid& g, const DirectorField& d, double eps)
{
    const double h2 = h_norm(g, d, 2);
    const double l2 = l2_norm(g, d);
    return h2 * h2 / (psi_functional(g, d, eps) + 2.0 * penalty_slope_bound(eps) * l2 * l2);
}

} // namespace slc
