#pragma once

#include "slc/integrators.hpp"
#include "slc/operators.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace slc {

enum class Scheme { em, picard };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);

/**
 * Every parameter of a run.  The text form is INI-like:
 *
 *     [section]
 *     key = value      # comment
 *
 * Lists are whitespace separated.  Unknown sections or keys are errors.
 */
struct SimConfig {
    // [grid]
    int n_dim = 2;
    std::array<int, 3> cells{32, 32, 32};
    std::array<double, 3> lengths{1.0, 1.0, 1.0};

    // [physics]
    double eps = 1.0;
    bool nonlinearity = true;
    bool penalty = true;
    bool evolve_velocity = true;
    bool director_diffusion = true;

    // [noise]
    NoiseCoefficientSpec noise;

    // [magnetic]
    MagneticFieldSpec magnetic;

    // [initial]
    std::string velocity_profile = "zero";
    double velocity_amplitude = 0.5;
    std::string director_profile = "uniform";
    double director_magnitude = 1.0;
    double tilt_amplitude = 0.5;

    // [time]
    Scheme scheme = Scheme::em;
    double dt = 0x1p-10;
    double horizon = 1.0;

    // [picard]
    TruncationParams picard;

    // [stopping]
    std::vector<double> thresholds{10.0, 100.0, 1000.0};

    // [diagnostics]
    double q = 2.0;
    double c_phi = 1.0;
    int record_every = 10;
    int snapshot_every = 0;
    double fit_start = 0.25;

    // [run]
    std::uint64_t seed = 1;
    int trajectories = 1;
    std::string output_dir = "out";

    bool operator==(const SimConfig& o) const;
};

/// Parses and validates; throws ConfigError carrying every problem found.
SimConfig parse_config(const std::string& text);
/// Lossless text form: parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& c);
/// Invariant violations of an assembled config (empty when valid).
std::vector<std::string> config_violations(const SimConfig& c);
/// Documented keys with their defaults, one per line.
std::string describe_config();

Grid build_config_grid(const SimConfig& c);

} // namespace slc
