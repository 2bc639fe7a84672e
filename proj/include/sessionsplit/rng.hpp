#pragma once

#include <cmath>
#include <cstdint>

namespace sessionsplit {

// Counter-based randomness: every draw is a pure function of its key, so
// parallel evaluation order can never change a result. splitmix64 is the
// usual finalizer; Box-Muller turns two uniforms into one normal.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9E3779B97F4A7C15ull));
}

inline std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_keys(mix_keys(a, b), c);
}

// Uniform in (0, 1]: 53 mantissa bits, never exactly zero.
inline double uniform_from_bits(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

// One standard normal draw for the given key.
inline double standard_normal(std::uint64_t key) {
    double u1 = uniform_from_bits(splitmix64(key));
    double u2 = uniform_from_bits(splitmix64(key ^ 0xD1B54A32D192ED03ull));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace sessionsplit
