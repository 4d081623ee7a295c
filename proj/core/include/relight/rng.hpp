#pragma once

#include <cstdint>
#include <vector>

namespace relight {

// splitmix64 (Steele, Lea, Flood 2014). Used everywhere instead of the
// standard distributions so that results are identical across platforms
// and independent of library implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stateful stream over splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform double in [0, 1), 53 mantissa bits.
    double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    /// In-place Fisher-Yates shuffle with this stream.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Stateless counter-based draw: a pure function of its inputs, so per-pixel
/// samples are reproducible no matter how the pixels are traversed.
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a ^ (b + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2));
    return splitmix64(s);
}

inline double counter_u01(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = hash_combine(hash_combine(seed, a), b);
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

} // namespace relight
