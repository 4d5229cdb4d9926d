#include "dephasim/rng.hpp"

namespace dephasim {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
    for (auto& word : s_) {
        seed += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = seed;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        word = z ^ (z >> 31);
    }
}

std::uint64_t derive_seed(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index) noexcept {
    std::uint64_t h = mix64(master_seed);
    h = mix64(h ^ static_cast<std::uint64_t>(domain));
    return mix64(h ^ mix64(index));
}

Engine make_stream(std::uint64_t master_seed, StreamDomain domain, std::uint64_t index) {
    return Engine{derive_seed(master_seed, domain, index)};
}

}  // namespace dephasim
