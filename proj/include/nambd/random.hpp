#pragma once

#include <cstdint>
#include <random>

#include "nambd/errors.hpp"
#include "nambd/geometry.hpp"
#include "nambd/vec3.hpp"

namespace nambd {

// 64-bit avalanche finalizer (splitmix64). Used both for stream derivation
// and for cell-index mixing in the experiment harness.
std::uint64_t mix64(std::uint64_t z);

// Seedable random stream. Two generator kinds are provided:
//  - MersenneTwister: std::mt19937_64
//  - BaselineLcg: the 48-bit linear congruential generator of java.util.Random
//    (multiplier 0x5DEECE66D, addend 11), standing in for "the default RNG"
// Identical (kind, seed) reproduces the identical sequence on any platform.
//
// next_standard_normal uses the Marsaglia polar method with a cached spare;
// the number of uniforms consumed per call varies with rejection but the
// sequence is a pure function of (kind, seed).
class RandomStream {
  public:
    RandomStream(RngKind kind, std::uint64_t seed);

    RngKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }

    // Uniform on [0, 1), 53 random bits.
    double next_uniform();

    double next_standard_normal();

    // Uniform on the sphere of the given radius (normalized Gaussian triple).
    Vec3 sample_uniform_on_sphere(double radius);

  private:
    std::uint64_t next_lcg_bits(int bits);

    RngKind kind_;
    std::uint64_t seed_;
    std::mt19937_64 mt_;
    std::uint64_t lcg_state_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Independent, reproducible stream for one replication. Master seed and index
// are combined through mix64 so that streams for distinct indices are
// decorrelated even for the LCG kind.
RandomStream derive_replication_stream(std::uint64_t master_seed,
                                       std::uint64_t replication_index, RngKind kind);

}  // namespace nambd
