#pragma once

#include "slc/fields.hpp"
#include "slc/operators.hpp"

#include <cstdint>

namespace slc {

/// Smooth random fields for property tests and probes.  Each is a finite
/// trigonometric series with coefficients ~ N(0,1) / (1 + p^2 + q^2 [+ r^2])^decay,
/// drawn from the counter-based generator so the result depends only on the seed.
/// The field is scaled to the requested root-mean-square value.
struct RandomFieldSpec {
    std::uint64_t seed = 1;
    double rms = 1.0;
    int max_mode = 4;
    double decay = 1.5;
};

/// Cosine series in each component: compatible with the Neumann director boundary.
DirectorField random_director(const Grid& g, const RandomFieldSpec& spec);
/// Discrete curl of a stream-function series whose value and gradient vanish on the
/// walls: solenoidal, zero normal and (to the grid accuracy) tangential trace.
VectorField random_velocity(const Grid& g, const RandomFieldSpec& spec);
/// Sine series at cell centres: vanishes on the walls.
Array3 random_dirichlet_scalar(const Grid& g, const RandomFieldSpec& spec);

} // namespace slc
