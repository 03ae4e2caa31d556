#include "path_rng.hpp"

#include <cmath>

namespace gf {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

PathRng::PathRng(std::uint64_t base_seed, std::uint64_t path_index, std::uint64_t substream)
    : key_(splitmix64(splitmix64(base_seed + kGolden) ^
                      splitmix64(path_index * 0xD1B54A32D192ED03ull + substream + 1))) {}

std::uint64_t PathRng::next_u64() {
    ++counter_;
    return splitmix64(key_ + counter_ * kGolden);
}

double PathRng::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double PathRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

}  // namespace gf
