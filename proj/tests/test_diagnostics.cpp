#include "support.hpp"

#include "slc/config.hpp"
#include "slc/diagnostics.hpp"
#include "slc/errors.hpp"
#include "slc/integrators.hpp"
#include "slc/random_fields.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <numbers>

using namespace slc;
using slc::test::Rng;
using slc::test::unit_square;

namespace {

constexpr double pi = std::numbers::pi;

TrajectoryRecord synthetic(const std::vector<double>& t, const std::vector<double>& e)
{
    TrajectoryRecord r;
    for (std::size_t i = 0; i < t.size(); ++i) {
        RecordRow row;
        row.t = t[i];
        row.energy.e_q = e[i];
        r.rows.push_back(row);
    }
    return r;
}

State random_state(const Grid& g, std::uint64_t seed, double amplitude)
{
    State s;
    s.v = random_velocity(g, {seed, amplitude, 4, 1.5});
    s.d = random_director(g, {seed + 7, amplitude, 4, 1.5});
    return s;
}

} // namespace

TEST_SUITE("diagnostics")
{
    TEST_CASE("maximum principle gap examples")
    {
        const Grid g = unit_square(8);
        CHECK(max_principle_gap(g, DirectorField::constant(g, {0.6, 0.8, 0.0})) == 0.0);
        CHECK(max_principle_gap(g, DirectorField::constant(g, {0.1, 0.2, 0.3})) == 0.0);
        DirectorField d = DirectorField::constant(g, {0.0, 0.5, 0.0});
        d.c[0][17] = std::sqrt(1.5);
        d.c[1][17] = 0.0;
        CHECK(max_principle_gap(g, d) == doctest::Approx(0.25 / 64.0).epsilon(1e-14));
    }

    TEST_CASE("energy functionals on simple states")
    {
        const Grid g = unit_square(16);
        const State zero = State::zeros(g);
        CHECK(energy_q(g, zero, 2.0) == 0.0);
        CHECK(psi_functional(g, zero.d, 1.0) == 0.0);
        CHECK(phi_increment(g, zero, 0.1, 2) == 0.0);
        CHECK_THROWS_AS(energy_q(g, zero, 1.5), DomainError);

        State unit = zero;
        unit.d = DirectorField::constant(g, {0.0, 0.0, 1.0});
        CHECK(psi_functional(g, unit.d, 0.7) < 1e-28);
        CHECK(energy_q(g, unit, 3.0) == doctest::Approx(1.0).epsilon(1e-14));

        State s = random_state(g, 3, 1.0);
        const double v = l2_norm(g, s.v), a = a_half_norm(g, s.v);
        CHECK(phi_increment(g, s, 0.01, 2, 3.0) == doctest::Approx(0.01 * 3.0 * v * v * a * a).epsilon(1e-14));
        CHECK(phi_increment(g, s, 0.01, 3, 1.0) == doctest::Approx(0.01 * v * v * std::pow(a, 6)).epsilon(1e-14));
        CHECK_THROWS_AS(phi_increment(g, s, 0.01, 4), DomainError);

        EnergyRecord r = energy_record(build_model(SimConfig{}), State::zeros(build_config_grid(SimConfig{})), 2.0, 0.5);
        CHECK(r.e_q == 0.0);
        CHECK(r.phi_weight == 0.5);
    }

    TEST_CASE("energy record entries are consistent")
    {
        SimConfig c;
        c.cells = {16, 16, 1};
        const Model m = build_model(c);
        State s = random_state(m.grid, 9, 0.8);
        EnergyRecord r = energy_record(m, s, 2.0, 1.0);
        const Grid& g = m.grid;
        CHECK(r.e_q == doctest::Approx(std::pow(l2_norm(g, s.v), 2) + std::pow(l2_norm(g, s.d), 2) +
                                       std::pow(grad_norm(g, s.d), 2)));
        CHECK(r.diss_grad_v == doctest::Approx(std::pow(a_half_norm(g, s.v), 2)));
        CHECK(r.diss_lap_d == doctest::Approx(std::pow(laplacian_norm(g, s.d), 2)));
        CHECK(r.psi >= 0.0);
        CHECK(r.max_gap >= 0.0);
    }

    TEST_CASE("lipschitz probe")
    {
        SimConfig c;
        c.cells = {16, 16, 1};
        const Model m = build_model(c);
        const Grid& g = m.grid;
        State y1 = random_state(g, 11, 1.0);
        State y2 = y1;
        y2 *= 1.0 + 1e-8;
        const double r = lipschitz_probe_F(m, y1, y2);
        CHECK(std::isfinite(r));
        CHECK(r > 0.0);
        CHECK_THROWS_AS(lipschitz_probe_F(m, y1, y1), DomainError);

        double worst = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            const double x = lipschitz_probe_F(m, random_state(g, 100 + s, 1.0), random_state(g, 300 + s, 1.0));
            CHECK(std::isfinite(x));
            worst = std::max(worst, x);
        }
        CHECK(worst > 0.0);
        CHECK(worst < 1e3);
    }

    TEST_CASE("energy bound fit on synthetic ensembles")
    {
        CHECK_THROWS_AS(ensemble_energy_bound({}), ConfigError);

        std::vector<double> t, grow, decay;
        for (int i = 0; i <= 20; ++i) {
            t.push_back(0.05 * i);
            grow.push_back(2.0 * std::exp(0.7 * t.back()));
            decay.push_back(2.0 * std::exp(-0.7 * t.back()));
        }
        EnergyBoundFit g = ensemble_energy_bound({synthetic(t, grow)});
        CHECK(g.e0 == 2.0);
        CHECK(g.c_growth == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(g.violation_count == 0);

        EnergyBoundFit d = ensemble_energy_bound({synthetic(t, decay)});
        CHECK(d.c_growth == 0.0);
        CHECK(d.violation_count == 0);

        // An early bump above the late growth rate shows up as a violation.
        std::vector<double> bump = grow;
        bump[1] *= 1.5;
        EnergyBoundFit b = ensemble_energy_bound({synthetic(t, bump)}, 0.25);
        CHECK(b.c_growth == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(b.violation_count == 1);

        EnergyBoundFit mean = ensemble_energy_bound({synthetic(t, grow), synthetic(t, decay)});
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(mean.mean_energy[i] == doctest::Approx(0.5 * (grow[i] + decay[i])));
    }

    TEST_CASE("identical trajectories average to the single one")
    {
        SimConfig c;
        c.cells = {16, 16, 1};
        c.horizon = 0x1p-6;
        c.record_every = 2;
        TrajectoryRecord r = run_trajectory(c, 5);
        EnergyBoundFit one = ensemble_energy_bound({r});
        EnergyBoundFit three = ensemble_energy_bound({r, r, r});
        REQUIRE(one.mean_energy.size() == r.rows.size());
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(one.mean_energy[i] == r.rows[i].energy.e_q);
            CHECK(three.mean_energy[i] == doctest::Approx(r.rows[i].energy.e_q).epsilon(1e-15));
        }
        CHECK(three.c_growth == doctest::Approx(one.c_growth).epsilon(1e-12));
    }

    TEST_CASE("deterministic dissipative run has nonincreasing energy")
    {
        SimConfig c;
        c.cells = {16, 16, 1};
        c.noise.amplitude = 0.0;
        c.magnetic.amplitude = 0.0;
        c.velocity_profile = "mode";
        c.director_profile = "uniform";
        c.horizon = 0.25;
        c.record_every = 8;
        TrajectoryRecord r = run_trajectory(c, 1);
        for (std::size_t i = 1; i < r.rows.size(); ++i)
            CHECK(r.rows[i].energy.e_q <= r.rows[i - 1].energy.e_q * (1 + 1e-13));
        EnergyBoundFit fit = ensemble_energy_bound({r});
        CHECK(fit.c_growth == 0.0);
        CHECK(fit.violation_count == 0);
    }

    TEST_CASE("dissipation terms drive the linear energy balance")
    {
        // Linear dynamics: d/dt e_2 = -2 (|A^1/2 v|^2 + |grad d|^2 + |Lap d|^2).
        SimConfig c;
        c.cells = {16, 16, 1};
        c.nonlinearity = false;
        c.penalty = false;
        c.noise.amplitude = 0.0;
        c.magnetic.amplitude = 0.0;
        c.velocity_profile = "mode";
        c.director_profile = "tilt";
        c.tilt_amplitude = 0.8;
        c.record_every = 1;
        for (double dt : {0x1p-10, 0x1p-12}) {
            c.dt = dt;
            c.horizon = 64 * dt;
            TrajectoryRecord r = run_trajectory(c, 1);
            double worst = 0.0;
            for (std::size_t i = 1; i < r.rows.size(); ++i) {
                const EnergyRecord& a = r.rows[i - 1].energy;
                const EnergyRecord& b = r.rows[i].energy;
                const double rate = (b.e_q - a.e_q) / dt;
                const double diss = -(a.diss_grad_v + b.diss_grad_v + a.diss_grad_d + b.diss_grad_d + a.diss_lap_d +
                                      b.diss_lap_d);
                CHECK(rate < 0.0);
                worst = std::max(worst, std::abs(rate - diss) / std::abs(diss));
            }
            CHECK(worst < 400.0 * dt);
        }
    }

    TEST_CASE("gagliardo-nirenberg ratio of the first sine mode")
    {
        const Grid g = unit_square(128);
        Array3 u = sample_cell(g, [](double x, double y, double) { return std::sin(pi * x) * std::sin(pi * y); });
        const double expect = std::pow(9.0 / 64.0, 0.25) / (std::sqrt(0.5) * std::sqrt(pi / std::sqrt(2.0)));
        CHECK(gn_l4_ratio(g, u) == doctest::Approx(expect).epsilon(2e-3));
        CHECK(std::isfinite(gn_linf_ratio(g, u)));
        CHECK(gn_linf_ratio(g, u) > 0.0);
    }

    TEST_CASE("penalty slope bound is the sup of the jacobian")
    {
        CHECK(penalty_slope_bound(1.0) == 2.0);
        CHECK(penalty_slope_bound(0.5) == 8.0);
        CHECK_THROWS_AS(penalty_slope_bound(0.0), DomainError);
        Rng rng(71);
        double sup = 0.0;
        for (int i = 0; i < 2000; ++i) {
            Eigen::Vector3d d(rng.uniform(), rng.uniform(), rng.uniform());
            if (d.norm() > 1.0)
                continue;
            Eigen::Matrix3d jac = (d.squaredNorm() - 1.0) * Eigen::Matrix3d::Identity() + 2.0 * d * d.transpose();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(jac);
            sup = std::max(sup, es.eigenvalues().cwiseAbs().maxCoeff());
        }
        CHECK(sup <= penalty_slope_bound(1.0));
        CHECK(sup > 0.9 * penalty_slope_bound(1.0));
    }

    TEST_CASE("regularity ratio examples")
    {
        const Grid g = unit_square(16);
        DirectorField unit = DirectorField::constant(g, {1.0, 0.0, 0.0});
        CHECK(regularity_ratio(g, unit, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(regularity_ratio(g, unit, 0.5) == doctest::Approx(0.0625).epsilon(1e-12));
        for (std::uint64_t s = 0; s < 10; ++s) {
            const double r = regularity_ratio(g, random_director(g, {40 + s, 1.0, 4, 1.5}), 1.0);
            CHECK(std::isfinite(r));
            CHECK(r > 0.0);
        }
    }
}
