#pragma once
// Deterministic, platform-independent random streams.
//
// All randomness in the project flows from a single root seed through
// derive(): a stream is identified by (root, module tag, replicate index).
// Bounded draws use rejection so results do not depend on the standard
// library's distribution implementations.

#include <cstdint>
#include <string_view>

namespace ftk {

// splitmix64, used both as generator and as seed mixer.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, n), n >= 1; rejection keeps the law exact
    uint64_t below(uint64_t n) {
        uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % n);
        uint64_t v;
        do { v = next(); } while (v >= limit);
        return v % n;
    }

    double unit() { return double(next() >> 11) * 0x1.0p-53; }
};

inline uint64_t mix(uint64_t h, uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

inline uint64_t hash_tag(std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) { h ^= uint8_t(c); h *= 0x100000001b3ULL; }
    return h;
}

// The documented split scheme: (root seed, module tag, replicate index).
inline Rng derive(uint64_t root, std::string_view tag, uint64_t replicate = 0) {
    uint64_t h = mix(root, hash_tag(tag));
    h = mix(h, replicate);
    return Rng(h == 0 ? 0x9e3779b97f4a7c15ULL : h);
}

} // namespace ftk
