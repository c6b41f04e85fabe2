#pragma once

#include "slc/config.hpp"
#include "slc/diagnostics.hpp"
#include "slc/integrators.hpp"

#include <string>
#include <vector>

namespace slc {

struct EnsembleSummary {
    int trajectories = 0;
    int completed = 0;
    int blown_up = 0;
    int iteration_failed = 0;
    int numerical_failure = 0;
    /// Per threshold: number of trajectories with tau_k hit.
    std::vector<int> tau_hits;
    EnergyBoundFit fit;
};

/// Worker count from SLC_THREADS, else the hardware concurrency.
int thread_count_from_env();

/// Runs config.trajectories trajectories; trajectory i uses trajectory_seed(config.seed, i).
/// Snapshots go to snapshot_dir when it is nonempty and snapshot_every > 0.
std::vector<TrajectoryRecord> simulate_ensemble(const SimConfig& config, int threads,
                                                const std::string& snapshot_dir = {});

EnsembleSummary summarize(const SimConfig& config, const std::vector<TrajectoryRecord>& records);

/// CSV renderings.  Doubles use the shortest round-trip representation.
std::string trajectory_csv(const TrajectoryRecord& r);
std::string trajectories_csv(const SimConfig& config, const std::vector<TrajectoryRecord>& records);
std::string summary_csv(const SimConfig& config, const EnsembleSummary& s);
std::string mean_energy_csv(const EnsembleSummary& s);
std::string manifest_text(const SimConfig& config);

/// Full batch: manifest first (an unwritable directory fails here, before any
/// compute), then per-trajectory CSVs, snapshots and the ensemble files.
/// Returns the process exit code: 1 iff some trajectory ended iteration_failed.
int run_ensemble(const SimConfig& config, int threads);

} // namespace slc
