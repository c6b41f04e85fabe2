#include "slc/ensemble.hpp"
#include "slc/errors.hpp"
#include "slc/snapshot.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

namespace slc {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "slc 1.0.0";

std::string num(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string pad(std::size_t i, int width)
{
    std::string s = std::to_string(i);
    return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

} // namespace

int thread_count_from_env()
{
    if (const char* env = std::getenv("SLC_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<TrajectoryRecord> simulate_ensemble(const SimConfig& config, int threads, const std::string& snapshot_dir)
{
    const Model model = build_model(config);
    const auto n = static_cast<std::size_t>(config.trajectories);
    std::vector<TrajectoryRecord> records(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                SnapshotSink sink;
                if (!snapshot_dir.empty() && config.snapshot_every > 0)
                    sink = [&, i](const State& s, std::size_t step) {
                        write_file((fs::path(snapshot_dir) / ("snap_" + pad(i, 4) + "_" + pad(step, 8) + ".slcf"))
                                       .string(),
                                   encode_state(model.grid, s));
                    };
                records[i] = run_trajectory(config, model, trajectory_seed(config.seed, i),
                                            static_cast<std::uint32_t>(i), sink);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const int count = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return records;
}

EnsembleSummary summarize(const SimConfig& config, const std::vector<TrajectoryRecord>& records)
{
    EnsembleSummary s;
    s.trajectories = static_cast<int>(records.size());
    s.tau_hits.assign(config.thresholds.size(), 0);
    for (const auto& r : records) {
        switch (r.status) {
        case TrajectoryStatus::completed:
            ++s.completed;
            break;
        case TrajectoryStatus::blown_up:
            ++s.blown_up;
            break;
        case TrajectoryStatus::iteration_failed:
            ++s.iteration_failed;
            break;
        case TrajectoryStatus::numerical_failure:
            ++s.numerical_failure;
            break;
        }
        for (std::size_t k = 0; k < r.stopping.hit_times.size() && k < s.tau_hits.size(); ++k)
            if (r.stopping.hit_times[k])
                ++s.tau_hits[k];
    }
    s.fit = ensemble_energy_bound(records, config.fit_start);
    return s;
}

std::string trajectory_csv(const TrajectoryRecord& r)
{
    std::string out = "t,v_norm,e_norm,tau_value,cfl,e_q,psi,phi_weight,max_gap,diss_grad_v,diss_grad_d,diss_lap_d\n";
    for (const auto& row : r.rows) {
        const auto& e = row.energy;
        out += num(row.t) + "," + num(row.v_norm) + "," + num(row.e_norm) + "," + num(row.tau_value) + "," +
               num(row.cfl) + "," + num(e.e_q) + "," + num(e.psi) + "," + num(e.phi_weight) + "," + num(e.max_gap) +
               "," + num(e.diss_grad_v) + "," + num(e.diss_grad_d) + "," + num(e.diss_lap_d) + "\n";
    }
    return out;
}

std::string trajectories_csv(const SimConfig& config, const std::vector<TrajectoryRecord>& records)
{
    std::string out = "index,seed,status,final_t,picard_windows,last_picard_ratio";
    for (double k : config.thresholds)
        out += ",tau_" + num(k);
    out += "\n";
    for (const auto& r : records) {
        out += std::to_string(r.index) + "," + std::to_string(r.seed) + "," + to_string(r.status) + "," +
               num(r.rows.empty() ? 0.0 : r.rows.back().t) + "," + std::to_string(r.picard_windows) + "," +
               (r.picard_ratios.empty() ? std::string() : num(r.picard_ratios.back()));
        for (const auto& h : r.stopping.hit_times)
            out += "," + opt_num(h);
        out += "\n";
    }
    return out;
}

std::string summary_csv(const SimConfig& config, const EnsembleSummary& s)
{
    std::string out = "key,value\n";
    out += "trajectories," + std::to_string(s.trajectories) + "\n";
    out += "completed," + std::to_string(s.completed) + "\n";
    out += "blown_up," + std::to_string(s.blown_up) + "\n";
    out += "iteration_failed," + std::to_string(s.iteration_failed) + "\n";
    out += "numerical_failure," + std::to_string(s.numerical_failure) + "\n";
    for (std::size_t k = 0; k < s.tau_hits.size(); ++k)
        out += "tau_hits_" + num(config.thresholds[k]) + "," + std::to_string(s.tau_hits[k]) + "\n";
    out += "e0," + num(s.fit.e0) + "\n";
    out += "c_growth," + num(s.fit.c_growth) + "\n";
    out += "violation_count," + std::to_string(s.fit.violation_count) + "\n";
    return out;
}

std::string mean_energy_csv(const EnsembleSummary& s)
{
    std::string out = "t,mean_e_q,bound\n";
    for (std::size_t i = 0; i < s.fit.times.size(); ++i)
        out += num(s.fit.times[i]) + "," + num(s.fit.mean_energy[i]) + "," +
               num(s.fit.e0 * std::exp(s.fit.c_growth * s.fit.times[i])) + "\n";
    return out;
}

std::string manifest_text(const SimConfig& config)
{
    std::string out = "# " + std::string(kVersion) + "\n# resolved configuration\n";
    out += serialize_config(config);
    out += "\n[seeds]\n";
    for (int i = 0; i < config.trajectories; ++i)
        out += std::to_string(i) + " = " + std::to_string(trajectory_seed(config.seed, static_cast<std::uint64_t>(i))) +
               "\n";
    return out;
}

int run_ensemble(const SimConfig& config, int threads)
{
    auto violations = config_violations(config);
    if (!violations.empty())
        throw ConfigError(violations);
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    write_file((dir / "manifest.txt").string(), manifest_text(config));

    auto records = simulate_ensemble(config, threads, dir.string());
    for (const auto& r : records)
        write_file((dir / ("trajectory_" + pad(r.index, 4) + ".csv")).string(), trajectory_csv(r));
    EnsembleSummary s = summarize(config, records);
    write_file((dir / "trajectories.csv").string(), trajectories_csv(config, records));
    write_file((dir / "summary.csv").string(), summary_csv(config, s));
    write_file((dir / "ensemble_mean.csv").string(), mean_energy_csv(s));
    return s.iteration_failed > 0 ? 1 : 0;
}

} // namespace slc
