#include "slc/integrators.hpp"
#include "slc/config.hpp"
#include "slc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slc {

double theta_cutoff(double x, double n)
{
    // The only function with theta = 1 on [0,n], 0 on [2n,inf) and slope bounded
    // by 1/n is this ramp; any smoothing of the corners would need a steeper slope.
    return std::clamp(2.0 - x / n, 0.0, 1.0);
}

void validate(const TruncationParams& p)
{
    std::vector<std::string> e;
    if (!(p.n_trunc >= 1.0))
        e.push_back("picard.n_trunc must be >= 1");
    if (!(p.window > 0.0))
        e.push_back("picard.window must be positive");
    if (!(p.tol > 0.0))
        e.push_back("picard.tol must be positive");
    if (p.max_iters < 1)
        e.push_back("picard.max_iters must be >= 1");
    if (!e.empty())
        throw ConfigError(e);
}

State linear_step(const Model& m, const State& y, double dt)
{
    State out;
    out.v = m.evolve_velocity ? semigroup_velocity_step(m.grid, dt, y.v) : y.v;
    out.d = m.director_diffusion ? semigroup_director(m.grid, dt, y.d) : y.d;
    out.t = y.t + dt;
    return out;
}

State em_step(const Model& m, const State& y, double dt, const std::vector<double>& dw1, double dw2)
{
    if (!(dt > 0.0))
        throw DomainError("em_step needs dt > 0");
    State f = assemble_F(m, y);
    State noise = assemble_G(m, y, dw1, dw2);
    State star;
    if (m.evolve_velocity) {
        star.v = y.v;
        star.v.axpy(-dt, f.v);
        star.v += noise.v;
    } else {
        star.v = y.v;
    }
    // Drift -F - L with L = -G^2/2.
    star.d = y.d;
    star.d.axpy(-dt, f.d);
    star.d.axpy(0.5 * dt, g2_cross(y.d, m.h));
    star.d += noise.d;
    star.t = y.t;
    return linear_step(m, star, dt);
}

namespace {

struct NormPair {
    double v = 0.0;
    double e = 0.0;
};

NormPair norms(const Grid& g, const State& s) { return {v_norm(g, s), e_norm(g, s)}; }

/// Discrete X_T norm of a window trajectory: sup of v_norm^2 plus left Riemann sum of e_norm^2.
double xt_norm(const Grid& g, const std::vector<State>& u, double dt)
{
    XtAccumulator acc;
    for (std::size_t j = 0; j < u.size(); ++j) {
        NormPair n = norms(g, u[j]);
        acc = xt_update(acc, n.v, n.e, j + 1 < u.size() ? dt : 0.0);
    }
    return std::sqrt(acc.value_sq());
}

double xt_distance(const Grid& g, const std::vector<State>& a, const std::vector<State>& b, double dt)
{
    std::vector<State> diff;
    diff.reserve(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
        diff.push_back(a[j] - b[j]);
    return xt_norm(g, diff, dt);
}

/// Truncated drift -theta (F + L) at one grid time.
State truncated_drift(const Model& m, const State& y, double theta)
{
    State f = assemble_F(m, y);
    State l = assemble_L(m, y);
    f += l;
    f *= -theta;
    return f;
}

bool finite_window(const std::vector<State>& u)
{
    return std::all_of(u.begin(), u.end(), [](const State& s) { return all_finite(s); });
}

} // namespace

PicardResult picard_solve(const Model& m, const State& u0, const BrownianPath& path, std::size_t first_step,
                          std::size_t steps, const TruncationParams& params)
{
    validate(params);
    if (first_step + steps > path.steps)
        throw DomainError("picard window runs past the end of the path");
    const Grid& g = m.grid;
    const double dt = path.dt();
    PicardResult res;

    std::vector<State> prev(steps + 1, u0);
    for (std::size_t j = 0; j <= steps; ++j)
        prev[j].t = u0.t + dt * static_cast<double>(j);

    for (int sweep = 0; sweep < params.max_iters + 1; ++sweep) {
        // Cutoff arguments |prev|_{X_{t_j}} measured from the window start.
        std::vector<double> theta(steps + 1, 1.0);
        XtAccumulator acc;
        for (std::size_t j = 0; j <= steps; ++j) {
            NormPair n = norms(g, prev[j]);
            acc = xt_update(acc, n.v, 0.0, 0.0);
            double arg = std::sqrt(acc.value_sq());
            res.max_truncation_argument = std::max(res.max_truncation_argument, arg);
            theta[j] = theta_cutoff(arg, params.n_trunc);
            if (theta[j] < 1.0)
                res.cutoff_active = true;
            acc = xt_update(acc, 0.0, n.e, dt);
        }

        std::vector<State> drift(steps + 1);
        for (std::size_t j = 0; j <= steps; ++j)
            drift[j] = truncated_drift(m, prev[j], theta[j]);

        std::vector<State> next(steps + 1);
        next[0] = u0;
        for (std::size_t j = 0; j < steps; ++j) {
            const std::size_t step = first_step + j;
            State noise = assemble_G(m, prev[j], path.w1_increment(step), path.w2(step));
            State inner = next[j];
            inner.axpy(0.5 * dt, drift[j]);
            inner.axpy(theta[j], noise);
            State out = linear_step(m, inner, dt);
            out.axpy(0.5 * dt, drift[j + 1]);
            out.t = u0.t + dt * static_cast<double>(j + 1);
            next[j + 1] = std::move(out);
        }

        if (!finite_window(next)) {
            res.trajectory = std::move(next);
            return res;
        }
        double dist = xt_distance(g, next, prev, dt);
        if (!res.distances.empty())
            res.ratios.push_back(res.distances.back() > 0.0 ? dist / res.distances.back() : 0.0);
        res.distances.push_back(dist);
        prev = std::move(next);
        if (dist < params.tol) {
            res.converged = true;
            res.iterations = sweep;
            break;
        }
    }
    if (!res.converged)
        res.iterations = params.max_iters;
    res.trajectory = std::move(prev);
    return res;
}

StoppingRecord make_stopping_record(std::vector<double> thresholds)
{
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw ConfigError("stopping thresholds must be sorted ascending");
    StoppingRecord r;
    r.hit_times.assign(thresholds.size(), std::nullopt);
    r.thresholds = std::move(thresholds);
    return r;
}

double tau_functional(const Grid& g, const State& s) { return a_half_norm(g, s.v) + laplacian_norm(g, s.d); }

StoppingRecord detect_tau(double value, double t, StoppingRecord record)
{
    for (std::size_t i = 0; i < record.thresholds.size(); ++i)
        if (!record.hit_times[i] && value > record.thresholds[i])
            record.hit_times[i] = t;
    return record;
}

StoppingRecord detect_tau(const Grid& g, const State& s, StoppingRecord record)
{
    return detect_tau(tau_functional(g, s), s.t, std::move(record));
}

std::string to_string(TrajectoryStatus s)
{
    switch (s) {
    case TrajectoryStatus::completed:
        return "completed";
    case TrajectoryStatus::blown_up:
        return "blown_up";
    case TrajectoryStatus::iteration_failed:
        return "iteration_failed";
    case TrajectoryStatus::numerical_failure:
        return "numerical_failure";
    }
    return "unknown";
}

Model build_model(const SimConfig& c)
{
    auto violations = config_violations(c);
    if (!violations.empty())
        throw ConfigError(violations);
    Model m = Model::build(build_config_grid(c), c.eps, c.noise, c.magnetic);
    m.nonlinearity = c.nonlinearity;
    m.penalty = c.penalty;
    m.evolve_velocity = c.evolve_velocity;
    m.director_diffusion = c.director_diffusion;
    return m;
}

State initial_state(const SimConfig& c, const Model& m)
{
    const Grid& g = m.grid;
    State s = State::zeros(g);
    if (c.velocity_profile == "mode") {
        s.v = m.basis.psi.front();
        s.v *= c.velocity_amplitude;
    }
    const double rho = c.director_magnitude;
    if (c.director_profile == "uniform") {
        s.d = DirectorField::constant(g, {0.0, rho, 0.0});
    } else {
        const double lx = g.length(0), ly = g.length(1), a = c.tilt_amplitude;
        auto angle = [=](double x, double y) {
            return a * std::cos(std::numbers::pi * x / lx) * std::cos(std::numbers::pi * y / ly);
        };
        s.d = sample_director(g, {[=](double x, double y, double) { return rho * std::cos(angle(x, y)); },
                                  [=](double x, double y, double) { return rho * std::sin(angle(x, y)); },
                                  [](double, double, double) { return 0.0; }});
    }
    return s;
}

namespace {

double cfl_number(const Grid& g, const State& s, double dt)
{
    double h = g.spacing(0);
    for (int a = 1; a < g.n_dim(); ++a)
        h = std::min(h, g.spacing(a));
    return linf_norm(g, s.v) * dt / h;
}

class Recorder {
public:
    Recorder(const SimConfig& c, const Model& m, const SnapshotSink& sink, TrajectoryRecord& rec)
        : c_(c), m_(m), sink_(sink), rec_(rec)
    {
    }

    /// Called for every grid state including the initial one.  Returns false once the
    /// top threshold has been crossed.
    bool observe(const State& s, std::size_t step, bool last)
    {
        const Grid& g = m_.grid;
        double tau = tau_functional(g, s);
        rec_.stopping = detect_tau(tau, s.t, std::move(rec_.stopping));
        bool top_hit = rec_.stopping.hit_times.back().has_value();
        if (!all_finite(s))
            return false;
        if (step % static_cast<std::size_t>(c_.record_every) == 0 || last || top_hit)
            write_row(s, tau);
        if (sink_ && c_.snapshot_every > 0 && step % static_cast<std::size_t>(c_.snapshot_every) == 0)
            sink_(s, step);
        log_phi_ += phi_increment(g, s, c_.dt, g.n_dim(), c_.c_phi);
        return !top_hit;
    }

private:
    void write_row(const State& s, double tau)
    {
        const Grid& g = m_.grid;
        RecordRow row;
        row.t = s.t;
        row.v_norm = v_norm(g, s);
        row.e_norm = e_norm(g, s);
        row.tau_value = tau;
        row.cfl = cfl_number(g, s, c_.dt);
        row.energy = energy_record(m_, s, c_.q, std::exp(-log_phi_));
        rec_.rows.push_back(row);
    }

    const SimConfig& c_;
    const Model& m_;
    const SnapshotSink& sink_;
    TrajectoryRecord& rec_;
    double log_phi_ = 0.0; ///< left Riemann sum of phi over the steps taken so far
};

} // namespace

TrajectoryRecord run_trajectory_on_path(const SimConfig& c, const Model& m, const BrownianPath& path,
                                        const SnapshotSink& sink)
{
    if (std::abs(path.dt() - c.dt) > 1e-12 * c.dt)
        throw ConfigError("path dt does not match time.dt");
    if (path.mode_count != c.noise.mode_count)
        throw ConfigError("path mode count does not match noise.mode_count");
    TrajectoryRecord rec;
    rec.seed = path.seed;
    rec.index = path.trajectory;
    rec.stopping = make_stopping_record(c.thresholds);

    const std::size_t steps = path.steps;
    const double dt = path.dt();
    Recorder recorder(c, m, sink, rec);
    State s = initial_state(c, m);

    auto finish = [&](TrajectoryStatus status) {
        rec.status = status;
        rec.final_state = s;
        return rec;
    };
    auto after_step = [&](std::size_t step) {
        bool keep = recorder.observe(s, step, step == steps);
        if (!all_finite(s))
            return TrajectoryStatus::numerical_failure;
        return keep ? TrajectoryStatus::completed : TrajectoryStatus::blown_up;
    };

    if (!recorder.observe(s, 0, steps == 0))
        return finish(all_finite(s) ? TrajectoryStatus::blown_up : TrajectoryStatus::numerical_failure);

    if (c.scheme == Scheme::em) {
        for (std::size_t i = 0; i < steps; ++i) {
            s = em_step(m, s, dt, path.w1_increment(i), path.w2(i));
            s.t = dt * static_cast<double>(i + 1);
            auto status = after_step(i + 1);
            if (status != TrajectoryStatus::completed)
                return finish(status);
        }
        return finish(TrajectoryStatus::completed);
    }

    const auto window = static_cast<std::size_t>(std::llround(c.picard.window / dt));
    for (std::size_t start = 0; start < steps; start += window) {
        const std::size_t len = std::min(window, steps - start);
        PicardResult pr = picard_solve(m, s, path, start, len, c.picard);
        ++rec.picard_windows;
        rec.picard_ratios = pr.ratios;
        if (!pr.converged) {
            bool finite = finite_window(pr.trajectory);
            if (finite)
                s = pr.trajectory.back();
            return finish(finite ? TrajectoryStatus::iteration_failed : TrajectoryStatus::numerical_failure);
        }
        for (std::size_t j = 1; j <= len; ++j) {
            s = pr.trajectory[j];
            s.t = dt * static_cast<double>(start + j);
            auto status = after_step(start + j);
            if (status != TrajectoryStatus::completed)
                return finish(status);
        }
    }
    return finish(TrajectoryStatus::completed);
}

TrajectoryRecord run_trajectory(const SimConfig& c, const Model& m, std::uint64_t seed, std::uint32_t index,
                                const SnapshotSink& sink)
{
    BrownianPath path = sample_path(seed, c.horizon, c.dt, c.noise.mode_count, index);
    return run_trajectory_on_path(c, m, path, sink);
}

TrajectoryRecord run_trajectory(const SimConfig& c, std::uint64_t seed)
{
    Model m = build_model(c);
    return run_trajectory(c, m, seed, 0);
}

} // namespace slc
