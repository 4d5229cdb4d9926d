#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dephasim {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator, so
/// Boost.Random distributions can draw from it. The output sequence is
/// defined bit-for-bit by the algorithm, independent of platform.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    /// State words are four consecutive SplitMix64 outputs of `seed`.
    explicit Xoshiro256(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

using Engine = Xoshiro256;

/// Stream families. Distinct families never share a derived seed for the same
/// (master_seed, index) pair.
enum class StreamDomain : std::uint64_t {
    Path = 0x70617468ULL,
    Counts = 0x636f756eULL,
    Tomography = 0x746f6d6fULL,
    Calibration = 0x63616c69ULL,
};

/// Seed for stream `index` of `domain`, a pure function of its arguments.
std::uint64_t derive_seed(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index) noexcept;

/// Engine positioned at the start of stream `index`.
Engine make_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index);

}  // namespace dephasim
