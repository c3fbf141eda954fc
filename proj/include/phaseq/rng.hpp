#ifndef PHASEQ_RNG_HPP
#define PHASEQ_RNG_HPP

#include <cmath>
#include <cstdint>

namespace phaseq {

/// Small counter-friendly generator (splitmix64). Each Monte Carlo sample owns
/// a stream seeded from (seed, sample index), which makes estimates
/// independent of how samples are partitioned across workers.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal pair (Box-Muller).
    void normal_pair(double& z0, double& z1) {
        double u1 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * M_PI * uniform();
        z0 = r * std::cos(th);
        z1 = r * std::sin(th);
    }
};

inline std::uint64_t mix_stream_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (index * 0xD1342543DE82EF95ULL + 0x632BE59BD9B4E019ULL));
    g.next();
    return g.next();
}

} // namespace phaseq

#endif
