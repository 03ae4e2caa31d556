#pragma once

#include <cstdint>

namespace gf {

/// Counter-based stream keyed by (base_seed, path_index, substream).
///
/// Word k of a stream is splitmix64(key + k * 0x9E3779B97F4A7C15), so the
/// sequence is fully specified by integer arithmetic. Normals come from the
/// Marsaglia polar method on 53-bit uniforms, consuming uniforms in pairs and
/// caching the second variate.
class PathRng {
public:
    PathRng(std::uint64_t base_seed, std::uint64_t path_index, std::uint64_t substream = 0);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gf
