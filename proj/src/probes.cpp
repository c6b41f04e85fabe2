#include "slc/probes.hpp"
#include "slc/errors.hpp"
#include "slc/random_fields.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slc {

namespace {

Grid square(int n) { return build_grid(2, {n, n, 1}, {1.0, 1.0, 0.0}); }

double spread_of(const std::vector<double>& v)
{
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
}

RandomFieldSpec spec_for(std::uint64_t seed, double rms = 1.0, int max_mode = 4)
{
    RandomFieldSpec s;
    s.seed = seed;
    s.rms = rms;
    s.max_mode = max_mode;
    return s;
}

template <class Ratio>
RefinementProbe refinement(const std::vector<int>& cells, int samples, Ratio&& ratio)
{
    RefinementProbe p;
    p.cells = cells;
    for (int n : cells) {
        Grid g = square(n);
        double worst = 0.0;
        for (int s = 0; s < samples; ++s)
            worst = std::max(worst, ratio(g, s));
        p.constants.push_back(worst);
    }
    p.spread = spread_of(p.constants);
    return p;
}

ProbeResult band(std::string name, double measured, double lower, double upper, std::string detail = {})
{
    return {std::move(name), measured, lower, upper, measured >= lower && measured <= upper, std::move(detail)};
}

} // namespace

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("slope fit needs at least two matching points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

SkewProbe skew_probe(int cells, int samples, std::uint64_t seed)
{
    Grid g = square(cells);
    SkewProbe p;
    for (int s = 0; s < samples; ++s) {
        const std::uint64_t base = seed + 8 * static_cast<std::uint64_t>(s);
        VectorField u = random_velocity(g, spec_for(base));
        VectorField v = random_velocity(g, spec_for(base + 1));
        DirectorField d = random_director(g, spec_for(base + 2));

        p.b1 = std::max(p.b1, std::abs(inner(g, b1(g, u, v), v)) / (l2_norm(g, u) * a_half_norm(g, v) * l2_norm(g, v)));
        p.b2 = std::max(p.b2, std::abs(inner(g, b2(g, v, d), d)) / (l2_norm(g, v) * grad_norm(g, d) * l2_norm(g, d)));

        Array3 pressure = random_director(g, spec_for(base + 3)).c[0];
        VectorField gp{gradient(g, pressure, BcKind::neumann)};
        VectorField w = gp + u;
        VectorField pw = leray_project(g, w);
        p.idempotence = std::max(p.idempotence, l2_norm(g, leray_project(g, pw) - pw) / l2_norm(g, w));
        p.annihilation = std::max(p.annihilation, l2_norm(g, leray_project(g, gp)) / l2_norm(g, gp));
        p.helmholtz = std::max(p.helmholtz, l2_norm(g, pw - u) / l2_norm(g, w));
    }
    return p;
}

DualityProbe duality_probe(const std::vector<int>& cells)
{
    const double pi = std::numbers::pi, pi2 = pi * pi;
    DualityProbe p;
    p.cells = cells;
    std::vector<double> lx, ly;
    for (int n : cells) {
        Grid g = square(n);
        DirectorField d = sample_director(
            g, {[=](double x, double y, double) { return 0.6 * std::cos(pi * x) * std::cos(pi * y) + 0.3 * std::cos(2 * pi * x); },
                [=](double x, double y, double) { return 0.5 * std::cos(2 * pi * y) + 0.4 * std::cos(pi * x) * std::cos(2 * pi * y); },
                [=](double x, double, double) { return 0.2 * std::cos(pi * x) + 0.1; }});
        // Laplacian of the smooth field itself.
        DirectorField lap = sample_director(
            g, {[=](double x, double y, double) {
                    return -1.2 * pi2 * std::cos(pi * x) * std::cos(pi * y) - 1.2 * pi2 * std::cos(2 * pi * x);
                },
                [=](double x, double y, double) {
                    return -2.0 * pi2 * std::cos(2 * pi * y) - 2.0 * pi2 * std::cos(pi * x) * std::cos(2 * pi * y);
                },
                [=](double x, double, double) { return -0.2 * pi2 * std::cos(pi * x); }});
        Array3 stream(g.node_shape());
        const Shape s = g.node_shape();
        for (int j = 0; j < s[1]; ++j)
            for (int i = 0; i < s[0]; ++i) {
                double x = g.face(0, i), y = g.face(1, j);
                double sx = std::sin(pi * x), sy = std::sin(pi * y);
                stream(i, j, 0) = sx * sx * sy * sy * (1.0 + 0.5 * x);
            }
        VectorField v = curl_of_stream(g, stream);
        const double m_pair = inner(g, m_term(g, d, d), v);
        DirectorField lap_h;
        for (int k = 0; k < 3; ++k)
            lap_h.c[k] = laplacian(g, d.c[k], BcKind::neumann);
        const DirectorField adv = b2(g, v, d);
        p.discrete_gaps.push_back(std::abs(inner(g, adv, lap_h) - m_pair) / std::abs(m_pair));
        double gap = std::abs(inner(g, adv, lap) - m_pair);
        p.gaps.push_back(gap);
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(gap));
    }
    p.order = -least_squares_slope(lx, ly);
    return p;
}

RefinementProbe gn_l4_probe(const std::vector<int>& cells, int samples, std::uint64_t seed)
{
    return refinement(cells, samples, [seed](const Grid& g, int s) {
        return gn_l4_ratio(g, random_dirichlet_scalar(g, spec_for(seed + s)));
    });
}

RefinementProbe gn_linf_probe(const std::vector<int>& cells, int samples, std::uint64_t seed)
{
    return refinement(cells, samples, [seed](const Grid& g, int s) {
        return gn_linf_ratio(g, random_dirichlet_scalar(g, spec_for(seed + s)));
    });
}

RefinementProbe regularity_probe(const std::vector<int>& cells, int samples, std::uint64_t seed, double eps)
{
    return refinement(cells, samples, [seed, eps](const Grid& g, int s) {
        return regularity_ratio(g, random_director(g, spec_for(seed + s, 0.5)), eps);
    });
}

AmplitudeProbe lipschitz_probe(const SimConfig& base, const std::vector<double>& amplitudes, int pairs,
                               std::uint64_t seed)
{
    const Model m = build_model(base);
    const Grid& g = m.grid;
    AmplitudeProbe p;
    p.amplitudes = amplitudes;
    for (double a : amplitudes) {
        double worst = 0.0;
        for (int i = 0; i < pairs; ++i) {
            const std::uint64_t s = seed + 4 * static_cast<std::uint64_t>(i);
            State y1{random_velocity(g, spec_for(s, a, 3)), random_director(g, spec_for(s + 1, a, 3)), 0.0};
            State y2{random_velocity(g, spec_for(s + 2, a, 3)), random_director(g, spec_for(s + 3, a, 3)), 0.0};
            worst = std::max(worst, lipschitz_probe_F(m, y1, y2));
        }
        p.constants.push_back(worst);
    }
    p.spread = spread_of(p.constants);
    return p;
}

ContractionProbe contraction_probe(const SimConfig& config, const std::vector<double>& windows,
                                   const std::vector<std::uint64_t>& seeds)
{
    if (seeds.empty())
        throw ConfigError("contraction probe needs at least one seed");
    const Model m = build_model(config);
    const State u0 = initial_state(config, m);
    const double longest = *std::max_element(windows.begin(), windows.end());
    std::vector<BrownianPath> paths;
    for (std::uint64_t seed : seeds)
        paths.push_back(sample_path(seed, longest, config.dt, config.noise.mode_count));
    ContractionProbe p;
    std::vector<double> lx, ly, lf;
    for (double w : windows) {
        const auto steps = static_cast<std::size_t>(std::llround(w / config.dt));
        double log_rate = 0.0, log_first = 0.0;
        int worst = 0;
        bool all = true, usable = true;
        for (const BrownianPath& path : paths) {
            PicardResult r = picard_solve(m, u0, path, 0, steps, config.picard);
            worst = std::max(worst, r.iterations);
            all = all && r.converged;
            double acc = 0.0;
            for (double x : r.ratios)
                acc += x > 0.0 ? std::log(x) : 0.0;
            if (r.ratios.empty() || !(r.ratios.front() > 0.0)) {
                usable = false;
                continue;
            }
            log_rate += acc / static_cast<double>(r.ratios.size());
            log_first += std::log(r.ratios.front());
        }
        const double k = static_cast<double>(paths.size());
        p.windows.push_back(w);
        p.ratios.push_back(usable ? std::exp(log_rate / k) : 0.0);
        p.first_ratios.push_back(usable ? std::exp(log_first / k) : 0.0);
        p.iterations.push_back(worst);
        p.converged.push_back(all);
        if (usable) {
            lx.push_back(std::log(w));
            ly.push_back(log_rate / k);
            lf.push_back(log_first / k);
        }
    }
    if (lx.size() >= 2) {
        p.slope = least_squares_slope(lx, ly);
        p.first_slope = least_squares_slope(lx, lf);
    }
    return p;
}

InertnessProbe inertness_probe(const SimConfig& config, std::uint64_t seed)
{
    const Model m = build_model(config);
    const State u0 = initial_state(config, m);
    const BrownianPath path = sample_path(seed, config.picard.window, config.dt, config.noise.mode_count);
    TruncationParams doubled = config.picard;
    doubled.n_trunc *= 2.0;
    PicardResult a = picard_solve(m, u0, path, 0, path.steps, config.picard);
    PicardResult b = picard_solve(m, u0, path, 0, path.steps, doubled);
    return {v_norm(m.grid, a.trajectory.back()), v_norm(m.grid, b.trajectory.back()),
            a.cutoff_active || b.cutoff_active};
}

SimConfig rotation_config(double field_amplitude, double horizon, double dt)
{
    SimConfig c;
    c.cells = {4, 4, 1};
    c.nonlinearity = false;
    c.penalty = false;
    c.evolve_velocity = false;
    c.director_diffusion = false;
    c.velocity_profile = "zero";
    c.director_profile = "uniform";
    c.magnetic.amplitude = field_amplitude;
    c.noise.mode_count = 1;
    c.noise.amplitude = 0.0;
    c.dt = dt;
    c.horizon = horizon;
    c.record_every = 1 << 30;
    c.thresholds = {1e300};
    return c;
}

RotationProbe rotation_probe(const SimConfig& config, int levels, int paths, std::uint64_t seed)
{
    const Model m = build_model(config);
    const Grid& g = m.grid;
    std::size_t peak = 0;
    for (std::size_t n = 0; n < g.cell_count(); ++n)
        if (std::abs(m.h.c[0][n]) > std::abs(m.h.c[0][peak]))
            peak = n;

    RotationProbe p;
    std::vector<std::vector<double>> y(static_cast<std::size_t>(levels)), mart(static_cast<std::size_t>(levels));
    for (int i = 0; i < paths; ++i) {
        BrownianPath path = sample_path(trajectory_seed(seed, static_cast<std::uint64_t>(i)), config.horizon, config.dt,
                                        config.noise.mode_count, static_cast<std::uint32_t>(i));
        for (int l = 0; l < levels; ++l) {
            if (l > 0)
                path = refine(path);
            SimConfig c = config;
            c.dt = path.dt();
            TrajectoryRecord r = run_trajectory_on_path(c, m, path);
            const DirectorField& d = r.final_state.d;
            double mag = std::sqrt(d.c[0][peak] * d.c[0][peak] + d.c[1][peak] * d.c[1][peak] +
                                   d.c[2][peak] * d.c[2][peak]);
            double mt = 0.0;
            for (std::size_t s = 0; s < path.steps; ++s)
                mt += path.w2(s) * path.w2(s) / path.dt() - 1.0;
            y[static_cast<std::size_t>(l)].push_back(mag - 1.0);
            mart[static_cast<std::size_t>(l)].push_back(mt);
        }
    }
    std::vector<double> lx, ly;
    for (int l = 0; l < levels; ++l) {
        const auto& Y = y[static_cast<std::size_t>(l)];
        const auto& M = mart[static_cast<std::size_t>(l)];
        const double n = static_cast<double>(Y.size());
        double my = 0.0, mm = 0.0;
        for (std::size_t i = 0; i < Y.size(); ++i) {
            my += Y[i] / n;
            mm += M[i] / n;
        }
        double cym = 0.0, cmm = 0.0;
        for (std::size_t i = 0; i < Y.size(); ++i) {
            cym += (Y[i] - my) * (M[i] - mm);
            cmm += (M[i] - mm) * (M[i] - mm);
        }
        const double beta = cmm > 0.0 ? cym / cmm : 0.0;
        // E[M] = 0 exactly, so subtracting beta * M keeps the estimator unbiased.
        double mean = 0.0, var = 0.0;
        for (std::size_t i = 0; i < Y.size(); ++i)
            mean += (Y[i] - beta * M[i]) / n;
        for (std::size_t i = 0; i < Y.size(); ++i) {
            double r = Y[i] - beta * M[i] - mean;
            var += r * r / (n - 1.0);
        }
        const double dt = config.dt * std::ldexp(1.0, -l);
        p.dts.push_back(dt);
        p.drift.push_back(mean / config.horizon);
        p.std_error.push_back(std::sqrt(var / n) / config.horizon);
        lx.push_back(std::log(dt));
        ly.push_back(std::log(std::abs(mean / config.horizon)));
    }
    p.slope = levels >= 2 ? least_squares_slope(lx, ly) : 0.0;
    return p;
}

SimConfig agreement_config()
{
    SimConfig c;
    c.velocity_profile = "mode";
    c.velocity_amplitude = 0.1;
    c.director_profile = "tilt";
    c.tilt_amplitude = 0.2;
    c.noise.amplitude = 200.0;
    c.magnetic.amplitude = 0.1;
    c.horizon = 0.1;
    c.dt = 0.1 / 32;
    c.picard.window = 8 * c.dt;
    c.record_every = 1 << 30;
    return c;
}

AgreementProbe agreement_probe(const SimConfig& config, int levels, std::uint64_t seed)
{
    const Model m = build_model(config);
    AgreementProbe p;
    BrownianPath path = sample_path(seed, config.horizon, config.dt, config.noise.mode_count);
    for (int l = 0; l < levels; ++l) {
        if (l > 0)
            path = refine(path);
        SimConfig em = config;
        em.dt = path.dt();
        em.scheme = Scheme::em;
        SimConfig pc = em;
        pc.scheme = Scheme::picard;
        pc.picard.window = 8 * path.dt();
        TrajectoryRecord a = run_trajectory_on_path(em, m, path);
        TrajectoryRecord b = run_trajectory_on_path(pc, m, path);
        const double va = v_norm(m.grid, a.final_state), vb = v_norm(m.grid, b.final_state);
        p.dts.push_back(path.dt());
        p.em_v_norm.push_back(va);
        p.picard_v_norm.push_back(vb);
        p.rel_diff.push_back(std::abs(va - vb) / std::abs(va));
        p.picard_status.push_back(to_string(b.status));
    }
    return p;
}

std::vector<ProbeResult> run_probes(const SimConfig& config)
{
    std::vector<ProbeResult> out;
    const std::vector<int> grids{16, 32, 64};

    SkewProbe sk = skew_probe(32, 100, config.seed);
    out.push_back(band("b1_skew", sk.b1, 0.0, 1e-11));
    out.push_back(band("b2_skew", sk.b2, 0.0, 1e-11));
    out.push_back(band("leray_idempotence", sk.idempotence, 0.0, 1e-10));
    out.push_back(band("leray_gradient_annihilation", sk.annihilation, 0.0, 1e-10));

    DualityProbe du = duality_probe(grids);
    out.push_back(band("duality_order", du.order, 1.7, 2.3));
    out.push_back(band("duality_discrete_identity", *std::max_element(du.discrete_gaps.begin(), du.discrete_gaps.end()),
                       0.0, 1e-11));

    out.push_back(band("gn_l4_spread", gn_l4_probe(grids, 20, config.seed).spread, 1.0, 2.0));
    out.push_back(band("gn_linf_spread", gn_linf_probe(grids, 20, config.seed).spread, 1.0, 2.0));
    out.push_back(band("regularity_spread", regularity_probe(grids, 20, config.seed, config.eps).spread, 1.0, 2.0));
    out.push_back(band("lipschitz_spread", lipschitz_probe(config, {0.5, 1.0, 2.0}, 20, config.seed).spread, 1.0, 3.0));

    if (config.n_dim == 2) {
        ContractionProbe cp =
            contraction_probe(config, {0x1p-6, 0x1p-5, 0x1p-4, 0x1p-3, 0x1p-2},
                              {config.seed, config.seed + 1, config.seed + 2, config.seed + 3});
        out.push_back(band("contraction_slope", cp.slope, 0.15, 0.35,
                           "first-sweep slope " + std::to_string(cp.first_slope)));
        bool ok = true;
        for (std::size_t i = 0; i < cp.windows.size(); ++i)
            if (cp.windows[i] <= 0x1p-4 && !cp.converged[i])
                ok = false;
        out.push_back(band("picard_converges_short_windows", ok ? 1.0 : 0.0, 1.0, 1.0));
    }
    InertnessProbe in = inertness_probe(config, config.seed);
    out.push_back(band("truncation_inertness", std::abs(in.v_norm_base - in.v_norm_doubled), 0.0, config.picard.tol,
                       in.cutoff_active ? "cutoff active" : "cutoff inactive"));

    RotationProbe rp = rotation_probe(rotation_config(1.0, 0.25, 0x1p-6), 3, 4000, config.seed);
    out.push_back(band("rotation_drift_slope", rp.slope, 0.7, 1.3));

    AgreementProbe ap = agreement_probe(agreement_config(), 3, config.seed);
    bool shrinking = true;
    for (std::size_t i = 1; i < ap.rel_diff.size(); ++i)
        shrinking = shrinking && ap.rel_diff[i] < ap.rel_diff[i - 1];
    out.push_back(band("scheme_agreement", *std::max_element(ap.rel_diff.begin(), ap.rel_diff.end()), 0.0, 0.02));
    out.push_back(band("scheme_agreement_shrinks", shrinking ? 1.0 : 0.0, 1.0, 1.0));
    return out;
}

std::string probes_json(const std::vector<ProbeResult>& results)
{
    nlohmann::ordered_json j;
    bool all = true;
    j["probes"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        nlohmann::ordered_json e;
        e["name"] = r.name;
        e["measured"] = r.measured;
        e["lower"] = r.lower;
        e["upper"] = r.upper;
        e["passed"] = r.passed;
        if (!r.detail.empty())
            e["detail"] = r.detail;
        j["probes"].push_back(e);
    }
    j["all_passed"] = all;
    return j.dump(2) + "\n";
}

} // namespace slc
