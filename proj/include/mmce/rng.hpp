// Deterministic seedable RNG (xoshiro256**) with independent per-index streams.
//
// std::uniform_int_distribution is implementation-defined, so every bounded
// draw here goes through our own rejection sampler; experiment outputs are
// byte-identical across platforms and across scheduling when streams are
// derived per trial index.

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmce {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = splitmix64_next(s);
    }

    // Independent stream for trial/query `index` under a common seed.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
        std::uint64_t mixed = splitmix64_next(s);
        return Rng(mixed ^ index);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased draw from [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    double unit() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Random permutation of {lo, lo+1, ..., hi}.
    std::vector<std::uint16_t> permutation(std::uint16_t lo, std::uint16_t hi) {
        std::vector<std::uint16_t> v(static_cast<std::size_t>(hi - lo) + 1);
        std::iota(v.begin(), v.end(), lo);
        shuffle(v);
        return v;
    }

    // t distinct indices in [0, n), sorted ascending.
    std::vector<std::uint32_t> distinct(std::uint32_t n, std::uint32_t t) {
        if (t > n) throw std::invalid_argument("Rng::distinct: t > n");
        std::vector<std::uint32_t> out;
        out.reserve(t);
        if (t * 2 >= n) {
            std::vector<std::uint32_t> all(n);
            std::iota(all.begin(), all.end(), 0u);
            for (std::uint32_t i = 0; i < t; ++i) {
                const std::uint32_t j = i + static_cast<std::uint32_t>(below(n - i));
                std::swap(all[i], all[j]);
                out.push_back(all[i]);
            }
        } else {
            std::vector<bool> used(n, false);
            while (out.size() < t) {
                const auto x = static_cast<std::uint32_t>(below(n));
                if (!used[x]) {
                    used[x] = true;
                    out.push_back(x);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4] = {};
};

}  // namespace mmce
