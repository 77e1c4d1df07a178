#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace thermo::rng {

// SplitMix64 step; used to derive well-separated engine seeds from (master, index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic random stream. Variate algorithms are implemented here rather than
// via std distributions, whose algorithms the standard leaves unspecified; all
// reproducibility contracts (byte-identical reruns, thread-schedule independence)
// rest on this class.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    // Independent stream for parallel work item `index` under one master seed.
    static Stream derive(std::uint64_t master_seed, std::uint64_t index) {
        std::uint64_t s = master_seed;
        (void)splitmix64(s);
        s ^= 0x517cc1b727220a95ull * (index + 1);
        return Stream(splitmix64(s));
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Exponential with the given rate; uses -log1p(-u) so u = 0 is safe.
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    // Standard normal via Box-Muller (spare discarded to keep the state minimal).
    double normal() {
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace thermo::rng
