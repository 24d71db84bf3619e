#pragma once

#include <cstdint>
#include <numeric>
#include <string_view>
#include <vector>

namespace ccsim {

// Deterministic splittable RNG (splitmix64 seeding, xoshiro256++ stream).
// Streams are derived from (seed, label, indices), so adding one consumer to
// a simulation does not perturb any other consumer's draws. std::* engines
// are avoided for distributions because the standard leaves their output
// unspecified; everything here is bit-stable across platforms.
class Rng {
public:
    Rng() : Rng(0) {}

    explicit Rng(uint64_t seed) {
        uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    // Derived stream: hashes the label and indices into the seed.
    Rng(uint64_t seed, std::string_view label, uint64_t a = 0, uint64_t b = 0) {
        uint64_t x = seed;
        x = splitmix64(x) ^ fnv1a(label);
        x = splitmix64(x) ^ a;
        x = splitmix64(x) ^ b;
        for (auto& word : state_) word = splitmix64(x);
    }

    uint64_t next() {
        uint64_t const result = rotl(state_[0] + state_[3], 23) + state_[0];
        uint64_t const t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, bound). Rejection sampling, exactly uniform.
    uint64_t below(uint64_t bound) {
        if (bound == 0) return 0;
        uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [lo, hi] inclusive.
    uint64_t range(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }

    // Uniform double in [0, 1) with 53 bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return unit() < p;
    }

    // k distinct indices from [0, n), order of selection preserved.
    std::vector<size_t> sample_indices(size_t n, size_t k) {
        if (k > n) k = n;
        std::vector<size_t> pool(n);
        std::iota(pool.begin(), pool.end(), size_t{0});
        std::vector<size_t> out;
        out.reserve(k);
        for (size_t i = 0; i < k; ++i) {
            size_t j = i + static_cast<size_t>(below(n - i));
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static uint64_t fnv1a(std::string_view s) {
        uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<uint8_t>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    uint64_t state_[4]{};
};

}  // namespace ccsim
