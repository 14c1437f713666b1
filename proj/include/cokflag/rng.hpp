#pragma once

#include <cstdint>

namespace cokflag {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded via splitmix64; one independent stream per sample so
/// results do not depend on thread scheduling.
class Rng {
public:
    Rng(std::uint64_t master_seed, std::uint64_t stream) {
        std::uint64_t st = master_seed + stream * 0x9e3779b97f4a7c15ull + 0x6a09e667f3bcc909ull;
        for (auto& w : s_) w = splitmix64(st);
        if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 1;
    }

    std::uint64_t next() {
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

    /// Unbiased uniform draw in [0, n) (Lemire rejection).
    std::uint64_t bounded(std::uint64_t n) {
        unsigned __int128 m = (unsigned __int128)next() * n;
        std::uint64_t lo = std::uint64_t(m);
        if (lo < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                m = (unsigned __int128)next() * n;
                lo = std::uint64_t(m);
            }
        }
        return std::uint64_t(m >> 64);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace cokflag
