#include "support.hpp"

#include "slc/config.hpp"
#include "slc/errors.hpp"
#include "slc/integrators.hpp"
#include "slc/probes.hpp"
#include "slc/random_fields.hpp"

#include <doctest.h>

using namespace slc;
using slc::test::Rng;

namespace {

/// 16^2 defaults with a short horizon, so runs take a fraction of a second.
SimConfig small_config()
{
    SimConfig c;
    c.cells = {16, 16, 1};
    c.horizon = 0x1p-5;
    c.record_every = 1;
    return c;
}

/// Linear-only model: F = 0 and G = 0.
SimConfig linear_config()
{
    SimConfig c = small_config();
    c.nonlinearity = false;
    c.penalty = false;
    c.noise.amplitude = 0.0;
    c.magnetic.amplitude = 0.0;
    c.velocity_profile = "mode";
    c.director_profile = "tilt";
    return c;
}

double max_diff(const State& a, const State& b)
{
    double m = 0.0;
    for (std::size_t c = 0; c < a.v.c.size(); ++c)
        m = std::max(m, max_abs(a.v.c[c] - b.v.c[c]));
    for (int k = 0; k < 3; ++k)
        m = std::max(m, max_abs(a.d.c[k] - b.d.c[k]));
    return m;
}

} // namespace

TEST_SUITE("integrators")
{
    TEST_CASE("cutoff values")
    {
        for (double n : {1.0, 7.0, 1e4}) {
            CHECK(theta_cutoff(0.0, n) == 1.0);
            CHECK(theta_cutoff(0.5 * n, n) == 1.0);
            CHECK(theta_cutoff(n, n) == 1.0);
            CHECK(theta_cutoff(1.5 * n, n) == doctest::Approx(0.5));
            CHECK(theta_cutoff(2.0 * n, n) == 0.0);
            CHECK(theta_cutoff(3.0 * n, n) == 0.0);
        }
    }

    TEST_CASE("cutoff is 1/n-lipschitz on a lattice")
    {
        for (double n : {1.0, 3.0, 50.0}) {
            for (int i = 0; i <= 200; ++i)
                for (int j = 0; j <= 200; j += 7) {
                    const double x = 3.0 * n * i / 200.0, y = 3.0 * n * j / 200.0;
                    CHECK(std::abs(theta_cutoff(x, n) - theta_cutoff(y, n)) <= std::abs(x - y) / n * (1 + 1e-12) + 1e-15);
                }
        }
    }

    TEST_CASE("truncation parameter validation")
    {
        TruncationParams p;
        CHECK_NOTHROW(validate(p));
        p.n_trunc = 0.5;
        p.tol = 0.0;
        p.window = -1.0;
        try {
            validate(p);
            FAIL("expected a configuration error");
        } catch (const ConfigError& e) {
            CHECK(e.violations().size() == 3);
        }
    }

    TEST_CASE("euler-maruyama fixed points")
    {
        SimConfig c = small_config();
        c.noise.amplitude = 0.0;
        c.magnetic.amplitude = 0.0;
        const Model m = build_model(c);
        const Grid& g = m.grid;
        const std::vector<double> dw(16, 0.0);
        State zero = State::zeros(g);
        CHECK(max_diff(em_step(m, zero, c.dt, dw, 0.0), zero) == 0.0);

        State rest = State::zeros(g);
        rest.d = DirectorField::constant(g, {0.0, 0.6, 0.8});
        CHECK(max_diff(em_step(m, rest, c.dt, dw, 0.0), rest) < 1e-14);
        CHECK_THROWS_AS(em_step(m, rest, 0.0, dw, 0.0), DomainError);
    }

    TEST_CASE("director-only step rescales |d|^2 by the exact rotation factor")
    {
        SimConfig c = rotation_config(1.7, 0.25, 0x1p-6);
        const Model m = build_model(c);
        const Grid& g = m.grid;
        State s = initial_state(c, m);
        for (double dw : {-0.3, 0.0, 0.05, 0.4}) {
            State next = em_step(m, s, c.dt, {0.0}, dw);
            for (std::size_t n = 0; n < g.cell_count(); ++n) {
                const double a2 = m.h.c[0][n] * m.h.c[0][n];
                const double factor = std::pow(1.0 - 0.5 * a2 * c.dt, 2) + a2 * dw * dw;
                double mag = 0.0;
                for (int k = 0; k < 3; ++k)
                    mag += next.d.c[k][n] * next.d.c[k][n];
                CHECK(mag == doctest::Approx(factor).epsilon(1e-14));
                CHECK(next.d.c[0][n] == 0.0);
            }
            CHECK(l2_norm(g, next.v) == 0.0);
        }
    }

    TEST_CASE("velocity stays solenoidal after every step")
    {
        SimConfig c = small_config();
        c.velocity_profile = "mode";
        c.director_profile = "tilt";
        const Model m = build_model(c);
        const Grid& g = m.grid;
        const BrownianPath path = sample_path(3, c.horizon, c.dt, c.noise.mode_count);
        State s = initial_state(c, m);
        for (std::size_t i = 0; i < path.steps; ++i) {
            s = em_step(m, s, c.dt, path.w1_increment(i), path.w2(i));
            const double scale = std::max(1.0, linf_norm(g, s.v)) / g.spacing(0);
            CHECK(max_abs(divergence(g, s.v.c)) <= 1e-10 * scale);
        }
    }

    TEST_CASE("frozen velocity is left untouched")
    {
        SimConfig c = small_config();
        c.velocity_profile = "mode";
        c.evolve_velocity = false;
        const Model m = build_model(c);
        State s = initial_state(c, m);
        const BrownianPath path = sample_path(4, c.horizon, c.dt, c.noise.mode_count);
        State next = em_step(m, s, c.dt, path.w1_increment(0), path.w2(0));
        CHECK(next.v == s.v);
    }

    TEST_CASE("picard with no drift and no noise is the linear evolution")
    {
        SimConfig c = linear_config();
        const Model m = build_model(c);
        const State u0 = initial_state(c, m);
        const BrownianPath path = sample_path(5, 16 * c.dt, c.dt, c.noise.mode_count);
        PicardResult r = picard_solve(m, u0, path, 0, 16, c.picard);
        CHECK(r.converged);
        CHECK(r.iterations == 1);
        REQUIRE(r.trajectory.size() == 17);
        State s = u0;
        for (std::size_t j = 1; j <= 16; ++j) {
            s = linear_step(m, s, c.dt);
            CHECK(max_diff(r.trajectory[j], s) < 1e-13);
        }
        CHECK_FALSE(r.cutoff_active);
    }

    TEST_CASE("picard contracts and converges on the default model")
    {
        SimConfig c = small_config();
        c.velocity_profile = "mode";
        c.director_profile = "tilt";
        const Model m = build_model(c);
        const State u0 = initial_state(c, m);
        const BrownianPath path = sample_path(6, c.picard.window, c.dt, c.noise.mode_count);
        PicardResult r = picard_solve(m, u0, path, 0, path.steps, c.picard);
        CHECK(r.converged);
        CHECK(r.distances.back() < c.picard.tol);
        REQUIRE_FALSE(r.ratios.empty());
        for (double x : r.ratios)
            CHECK(x < 1.0);
        CHECK_FALSE(r.cutoff_active);
        CHECK(r.max_truncation_argument < c.picard.n_trunc);

        TruncationParams tight = c.picard;
        tight.n_trunc = 1.0;
        PicardResult cut = picard_solve(m, u0, path, 0, path.steps, tight);
        CHECK(cut.cutoff_active);

        TruncationParams once = c.picard;
        once.max_iters = 1;
        CHECK_FALSE(picard_solve(m, u0, path, 0, path.steps, once).converged);
    }

    TEST_CASE("stopping record examples")
    {
        StoppingRecord r = make_stopping_record({0.5});
        for (int i = 0; i <= 10; ++i)
            r = detect_tau(0.1 * i, 0.1 * i, r);
        REQUIRE(r.hit_times[0].has_value());
        CHECK(*r.hit_times[0] == doctest::Approx(0.6));

        const Grid g = slc::test::unit_square(8);
        StoppingRecord z = detect_tau(g, State::zeros(g), make_stopping_record({1e-12, 1.0}));
        CHECK_FALSE(z.hit_times[0].has_value());
        CHECK_FALSE(z.hit_times[1].has_value());

        StoppingRecord two = make_stopping_record({1.0, 2.0});
        for (int i = 0; i <= 30; ++i)
            two = detect_tau(std::exp(0.05 * i), 0.01 * i, two);
        REQUIRE(two.hit_times[1].has_value());
        CHECK(*two.hit_times[0] <= *two.hit_times[1]);
        // A later dip and regrowth does not move the first crossing.
        const double first = *two.hit_times[0];
        two = detect_tau(0.0, 1.0, two);
        two = detect_tau(5.0, 2.0, two);
        CHECK(*two.hit_times[0] == first);

        CHECK_THROWS_AS(make_stopping_record({2.0, 1.0}), ConfigError);
    }

    TEST_CASE("tau functional matches its two parts")
    {
        const Grid g = slc::test::unit_square(16);
        State s;
        s.v = random_velocity(g, {1, 1.0, 4, 1.5});
        s.d = random_director(g, {2, 1.0, 4, 1.5});
        CHECK(tau_functional(g, s) == doctest::Approx(a_half_norm(g, s.v) + laplacian_norm(g, s.d)));
    }

    TEST_CASE("horizon zero records only the initial state")
    {
        SimConfig c = small_config();
        c.horizon = 0.0;
        TrajectoryRecord r = run_trajectory(c, 1);
        CHECK(r.status == TrajectoryStatus::completed);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].t == 0.0);
        CHECK(r.rows[0].energy.phi_weight == 1.0);
    }

    TEST_CASE("runs are deterministic and rows are well formed")
    {
        SimConfig c = small_config();
        for (Scheme scheme : {Scheme::em, Scheme::picard}) {
            c.scheme = scheme;
            c.picard.window = 8 * c.dt;
            TrajectoryRecord a = run_trajectory(c, 77), b = run_trajectory(c, 77);
            CHECK(a.status == TrajectoryStatus::completed);
            REQUIRE(a.rows.size() == b.rows.size());
            REQUIRE(a.rows.size() == 33);
            for (std::size_t i = 0; i < a.rows.size(); ++i) {
                CHECK(a.rows[i].v_norm == b.rows[i].v_norm);
                CHECK(a.rows[i].energy.e_q == b.rows[i].energy.e_q);
                if (i > 0) {
                    CHECK(a.rows[i].t > a.rows[i - 1].t);
                    CHECK(a.rows[i].energy.phi_weight <= a.rows[i - 1].energy.phi_weight);
                }
                CHECK(a.rows[i].energy.phi_weight > 0.0);
                CHECK(a.rows[i].energy.phi_weight <= 1.0);
                CHECK(a.rows[i].cfl >= 0.0);
            }
            CHECK(a.rows.back().t == doctest::Approx(c.horizon).epsilon(1e-15));
            CHECK(max_diff(a.final_state, b.final_state) == 0.0);
            if (scheme == Scheme::picard)
                CHECK(a.picard_windows == 4);
        }
    }

    TEST_CASE("tiny threshold is hit at time zero")
    {
        SimConfig c = small_config();
        c.velocity_profile = "mode";
        c.thresholds = {1e-6, 1e300};
        TrajectoryRecord r = run_trajectory(c, 1);
        REQUIRE(r.stopping.hit_times[0].has_value());
        CHECK(*r.stopping.hit_times[0] == 0.0);
        CHECK(r.status == TrajectoryStatus::completed);

        c.thresholds = {1e-6};
        TrajectoryRecord b = run_trajectory(c, 1);
        CHECK(b.status == TrajectoryStatus::blown_up);
        CHECK(b.rows.size() == 1);
    }

    TEST_CASE("failure statuses")
    {
        SimConfig c = small_config();
        c.scheme = Scheme::picard;
        c.picard.window = 8 * c.dt;
        c.picard.max_iters = 1;
        TrajectoryRecord r = run_trajectory(c, 2);
        CHECK(r.status == TrajectoryStatus::iteration_failed);
        CHECK(r.picard_windows == 1);
        CHECK_FALSE(r.picard_ratios.empty());

        // Norm overflow on finite fields trips the top threshold.
        SimConfig wild = small_config();
        wild.velocity_profile = "mode";
        wild.velocity_amplitude = 1e150;
        wild.thresholds = {1e308};
        CHECK(run_trajectory(wild, 2).status == TrajectoryStatus::blown_up);

        SimConfig c2 = small_config();
        Model poisoned = build_model(c2);
        poisoned.h.c[0][7] = std::nan("");
        for (Scheme scheme : {Scheme::em, Scheme::picard}) {
            c2.scheme = scheme;
            c2.picard.window = 8 * c2.dt;
            TrajectoryRecord w = run_trajectory(c2, poisoned, 2, 0);
            CHECK(w.status == TrajectoryStatus::numerical_failure);
            CHECK(to_string(w.status) == "numerical_failure");
        }
    }

    TEST_CASE("path and configuration must agree")
    {
        SimConfig c = small_config();
        const Model m = build_model(c);
        CHECK_THROWS_AS(run_trajectory_on_path(c, m, sample_path(1, c.horizon, 2 * c.dt, c.noise.mode_count)),
                        ConfigError);
        CHECK_THROWS_AS(run_trajectory_on_path(c, m, sample_path(1, c.horizon, c.dt, 3)), ConfigError);
    }

    TEST_CASE("euler-maruyama and picard agree on one path")
    {
        SimConfig c = agreement_config();
        c.cells = {16, 16, 1};
        AgreementProbe p = agreement_probe(c, 2, 3);
        for (std::size_t i = 0; i < p.rel_diff.size(); ++i) {
            CHECK(p.picard_status[i] == "completed");
            CHECK(p.rel_diff[i] < 0.02);
        }
        CHECK(p.rel_diff[1] < p.rel_diff[0]);
    }
}
