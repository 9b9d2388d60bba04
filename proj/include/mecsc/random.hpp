#pragma once

#include <cstdint>
#include <random>

namespace mecsc {

// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seeded generator with a portable mapping to [0, 1) doubles.
///
/// std::uniform_real_distribution is implementation defined, so the double
/// mapping is done by hand to keep scenarios bit-identical across standard
/// libraries.
class Rng {
public:
    enum class Stream : std::uint64_t { geometry = 0, links = 1, tasks = 2, test = 3 };

    explicit Rng(std::uint64_t seed, Stream stream = Stream::geometry)
        : engine_(mix_seed(seed, static_cast<std::uint64_t>(stream))) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // rejection sampling, no modulo bias
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace mecsc
