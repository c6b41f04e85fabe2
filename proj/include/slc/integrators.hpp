#pragma once

#include "slc/diagnostics.hpp"
#include "slc/fields.hpp"
#include "slc/noise.hpp"
#include "slc/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slc {

struct SimConfig;

/// Piecewise-linear cutoff: 1 on [0,n], 0 on [2n,inf), slope -1/n in between.
double theta_cutoff(double x, double n);

struct TruncationParams {
    double n_trunc = 1.0e4;
    double window = 0.0625;
    double tol = 1.0e-8;
    int max_iters = 60;
};

void validate(const TruncationParams& p);

/// One semi-implicit Euler-Maruyama step.
State em_step(const Model& m, const State& y, double dt, const std::vector<double>& dw1, double dw2);

/// Pure linear evolution over one step: implicit Euler for v, exact exponential for d.
State linear_step(const Model& m, const State& y, double dt);

struct PicardResult {
    std::vector<State> trajectory;  ///< window grid times, trajectory[0] = u0
    std::vector<double> distances;  ///< X_T distance between successive iterates
    std::vector<double> ratios;     ///< distances[m] / distances[m-1]
    int iterations = 0;             ///< applications of the map
    bool converged = false;
    double max_truncation_argument = 0.0; ///< largest |u|_{X_t} fed to theta_n
    bool cutoff_active = false;
};

/// Fixed point of the truncated mild map on steps [first_step, first_step + steps) of the path.
PicardResult picard_solve(const Model& m, const State& u0, const BrownianPath& path, std::size_t first_step,
                          std::size_t steps, const TruncationParams& params);

struct StoppingRecord {
    std::vector<double> thresholds;
    std::vector<std::optional<double>> hit_times;
};

StoppingRecord make_stopping_record(std::vector<double> thresholds);
/// ||A^{1/2} v|| + ||Delta d||.
double tau_functional(const Grid& g, const State& s);
/// Records first crossings of value > k at time t.
StoppingRecord detect_tau(double value, double t, StoppingRecord record);
StoppingRecord detect_tau(const Grid& g, const State& s, StoppingRecord record);

enum class TrajectoryStatus { completed, blown_up, iteration_failed, numerical_failure };
std::string to_string(TrajectoryStatus s);

struct RecordRow {
    double t = 0.0;
    double v_norm = 0.0;
    double e_norm = 0.0;
    double tau_value = 0.0;
    double cfl = 0.0;
    EnergyRecord energy;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    std::uint32_t index = 0;
    std::vector<RecordRow> rows;
    StoppingRecord stopping;
    TrajectoryStatus status = TrajectoryStatus::completed;
    std::vector<double> picard_ratios; ///< ratio history of the last Picard window
    int picard_windows = 0;
    State final_state;
};

/// Builds the model described by a configuration.
Model build_model(const SimConfig& config);
/// Initial state described by a configuration.
State initial_state(const SimConfig& config, const Model& m);

/// Observer for snapshots: called with (state, step index) at the configured cadence.
using SnapshotSink = std::function<void(const State&, std::size_t)>;

TrajectoryRecord run_trajectory(const SimConfig& config, std::uint64_t seed);
TrajectoryRecord run_trajectory(const SimConfig& config, const Model& m, std::uint64_t seed, std::uint32_t index,
                                const SnapshotSink& sink = {});
/// Same, on an explicitly provided path (its dt must equal the config dt).
TrajectoryRecord run_trajectory_on_path(const SimConfig& config, const Model& m, const BrownianPath& path,
                                        const SnapshotSink& sink = {});

} // namespace slc
