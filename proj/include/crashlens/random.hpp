#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crashlens {

// Seeded RNG helpers. std::normal_distribution's stream is implementation
// defined, so the normal sampler is pinned here (Marsaglia polar method) to
// keep seeded outputs stable regardless of the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // splitmix64 mix of (seed, stream), for deriving independent sub-seeds
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Independent stream, e.g. one per multistart index or sweep.
    static Rng derive(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed, stream));
    }

    // Uniform on [0, 1).
    double uniform() {
        return std::generate_canonical<double, 53>(engine_);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * scale;
        have_spare_ = true;
        return u * scale;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace crashlens
