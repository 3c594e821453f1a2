#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace wavespec {

/// SplitMix64 mixing step, used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for the stream `stream` split off a root seed. Streams derived from
/// the same root but different indices are independent for all practical
/// purposes, which lets Monte Carlo replications draw from (root, rep) pairs.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(splitmix64(root) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

/**
 * Deterministic stream of standard Gaussian variates.
 *
 * Uses mt19937_64 (fully specified by the standard) plus an explicit
 * Box-Muller transform, so identical seeds reproduce identical samples;
 * std::normal_distribution is implementation-defined and is avoided.
 */
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}
    GaussianStream(std::uint64_t root, std::uint64_t stream) : gen_(split_seed(root, stream)) {}

    /// Uniform double in (0, 1].
    double next_uniform() {
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53;
    }

    /// Standard normal variate.
    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace wavespec
