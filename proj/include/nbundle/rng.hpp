#pragma once

#include <cstdint>
#include <random>

namespace nbundle {

/// Deterministic uniform(0,1) stream. mt19937_64 output is fully
/// specified by the standard; the double conversion is done by hand so
/// streams are bit-identical across standard libraries.
class UniformRng {
public:
    explicit UniformRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double next() { return double(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; suitable as a jump threshold (never 0).
    double next_open() { return 1.0 - next(); }

private:
    std::mt19937_64 gen_;
};

/// splitmix64: stateless seed scrambler used to derive per-trajectory
/// seeds from (master seed, trajectory counter).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return splitmix64(master ^ splitmix64(counter + 1));
}

} // namespace nbundle
