#pragma once

#include "slc/fields.hpp"
#include "slc/noise.hpp"

#include <string>

namespace slc {

/**
 * Binary field snapshot, little endian:
 *
 *     char[4]  "SLCF"
 *     u32      version (1)
 *     u32      n_dim
 *     u32 x3   cell counts
 *     f64 x3   lengths (0 for an unused axis)
 *     u32      component count
 *     f64      time
 *     f64 ...  components in order, x fastest
 *
 * A state holds n_dim velocity components (face layout, one extra entry along
 * their own axis) followed by the three director components.
 */
std::string encode_state(const Grid& g, const State& s);
State decode_state(const Grid& g, const std::string& bytes);

/// Path dump in the same container: n_dim = 0, counts (steps, mode_count + 1,
/// refinement level), lengths (dt, horizon, 0), one component holding the
/// W1 increments step-major followed by the W2 increments.
std::string encode_path(const BrownianPath& p);

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

} // namespace slc
