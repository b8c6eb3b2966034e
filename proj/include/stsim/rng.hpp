#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace stsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic standard-normal stream keyed by (seed, node index).
/// Streams for distinct nodes are derived independently, so adding or
/// removing other nodes never perturbs a node's draws. Box-Muller keeps
/// the sequence portable across standard libraries.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, int node)
        : engine_(splitmix64(splitmix64(seed) ^
                             (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(node) + 1)))) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi() * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr double pi() { return 3.14159265358979323846; }

    double uniform() {
        // 53-bit mantissa draw in [0, 1).
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace stsim
