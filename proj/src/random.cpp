#include "nambd/random.hpp"

#include <cmath>

namespace nambd {

namespace {
constexpr std::uint64_t kLcgMultiplier = 0x5DEECE66DULL;
constexpr std::uint64_t kLcgAddend = 0xBULL;
constexpr std::uint64_t kLcgMask = (1ULL << 48) - 1;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;  // 2^-53
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

RandomStream::RandomStream(RngKind kind, std::uint64_t seed) : kind_(kind), seed_(seed) {
    if (kind_ == RngKind::MersenneTwister) {
        mt_.seed(seed);
    } else {
        lcg_state_ = (seed ^ kLcgMultiplier) & kLcgMask;
    }
}

std::uint64_t RandomStream::next_lcg_bits(int bits) {
    lcg_state_ = (lcg_state_ * kLcgMultiplier + kLcgAddend) & kLcgMask;
    return lcg_state_ >> (48 - bits);
}

double RandomStream::next_uniform() {
    if (kind_ == RngKind::MersenneTwister) {
        return static_cast<double>(mt_() >> 11) * kTwoPow53Inv;
    }
    const std::uint64_t hi = next_lcg_bits(26);
    const std::uint64_t lo = next_lcg_bits(27);
    return static_cast<double>((hi << 27) + lo) * kTwoPow53Inv;
}

double RandomStream::next_standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_uniform() - 1.0;
        v = 2.0 * next_uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

Vec3 RandomStream::sample_uniform_on_sphere(double radius) {
    if (!(radius > 0.0)) throw NonPositiveRadius("sphere radius must be > 0");
    Vec3 g;
    double n;
    do {
        g = {next_standard_normal(), next_standard_normal(), next_standard_normal()};
        n = g.norm();
    } while (n == 0.0);
    return g * (radius / n);
}

RandomStream derive_replication_stream(std::uint64_t master_seed,
                                       std::uint64_t replication_index, RngKind kind) {
    const std::uint64_t z =
        mix64(master_seed + 0x9E3779B97F4A7C15ULL * (replication_index + 1));
    return RandomStream(kind, z);
}

}  // namespace nambd
