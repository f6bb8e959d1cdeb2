#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace projld {

// SplitMix64 finaliser; also used to derive substream keys.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Keyed random stream. Two streams built from the same (seed, keys) produce
// identical sequences; different key tuples give statistically independent
// sequences. Satisfies UniformRandomBitGenerator so it plugs into <random>.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys = {}) noexcept
        : state_(mix64(seed)) {
        for (auto k : keys) state_ = mix64(state_ ^ mix64(k + 0x632be59bd9b4e019ULL));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

}  // namespace projld
