#include "copulascore/rng.hpp"

#include "copulascore/dist_math.hpp"

namespace copulascore {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t rep,
                            std::uint64_t purpose) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed), hi(seed), lo(rep), hi(rep), lo(purpose), hi(purpose)};
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t replication, std::uint64_t purpose)
    : engine_(make_engine(seed, replication, purpose)) {}

double Rng::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const auto k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return norm_quantile(uniform()); }

bool Rng::coin() { return (engine_() >> 63) != 0; }

}  // namespace copulascore
