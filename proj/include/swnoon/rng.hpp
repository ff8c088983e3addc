// Seeded uniform streams with a documented splitting rule. Substream i of a
// master seed s is seeded with splitmix64(s XOR (i+1)); uniforms are built
// from raw engine words so sequences do not depend on the standard library's
// distribution implementations.
#pragma once

#include <cstdint>
#include <random>

namespace swnoon {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    static RngStream substream(std::uint64_t master, std::uint64_t index) {
        return RngStream(master ^ (index + 1));
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace swnoon
