#pragma once

#include <cstdint>
#include <random>

namespace copulascore {

/// Seeded random stream used by every sampler in the library.
///
/// Streams are keyed by (seed, replication, purpose): the three words feed a
/// std::seed_seq, whose mixing algorithm is fixed by the standard, so a given
/// key yields the same stream on every platform and independent of the order
/// in which streams are created. Normals come from inversion of 53-bit
/// uniforms rather than std::normal_distribution, whose algorithm is
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t replication = 0,
                 std::uint64_t purpose = 0);

    /// Uniform on the open interval (0,1).
    double uniform();
    /// Uniform on [lo, hi].
    double uniform(double lo, double hi);
    double normal();
    bool coin();

private:
    std::mt19937_64 engine_;
};

}  // namespace copulascore
