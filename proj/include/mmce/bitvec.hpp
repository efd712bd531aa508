// Packed GF(2) vectors. Unused high bits of the last word are kept zero so
// that equality, weight and serialization can work word-wise.

#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/rng.hpp"

namespace mmce {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitVector random_weight(std::size_t n, std::size_t t, Rng& rng) {
        BitVector v(n);
        for (std::uint32_t idx : rng.distinct(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(t)))
            v.set(idx);
        return v;
    }

    static BitVector random(std::size_t n, Rng& rng) {
        BitVector v(n);
        for (auto& word : v.w_) word = rng.next();
        if (n % 64 != 0 && !v.w_.empty()) v.w_.back() &= (~0ULL) >> (64 - (n % 64));
        return v;
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v = true) {
        const std::uint64_t mask = 1ULL << (i & 63);
        if (v)
            w_[i >> 6] |= mask;
        else
            w_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) { w_[i >> 6] ^= 1ULL << (i & 63); }

    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    std::size_t weight() const {
        std::size_t c = 0;
        for (std::uint64_t x : w_) c += static_cast<std::size_t>(std::popcount(x));
        return c;
    }

    bool any() const {
        for (std::uint64_t x : w_)
            if (x) return true;
        return false;
    }

    BitVector& operator^=(const BitVector& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVector xor: length mismatch");
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }

    bool operator==(const BitVector&) const = default;

    std::vector<std::uint32_t> support() const {
        std::vector<std::uint32_t> out;
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t x = w_[wi];
            while (x) {
                const int b = std::countr_zero(x);
                out.push_back(static_cast<std::uint32_t>(wi * 64 + static_cast<std::size_t>(b)));
                x &= x - 1;
            }
        }
        return out;
    }

    // Slice [off, off+len) into a fresh vector.
    BitVector slice(std::size_t off, std::size_t len) const {
        BitVector out(len);
        for (std::size_t i = 0; i < len; ++i)
            if (get(off + i)) out.set(i);
        return out;
    }

    void paste(std::size_t off, const BitVector& src) {
        for (std::size_t i = 0; i < src.size(); ++i) set(off + i, src.get(i));
    }

    std::uint64_t* words() { return w_.data(); }
    const std::uint64_t* words() const { return w_.data(); }
    std::size_t word_count() const { return w_.size(); }

    // ceil(n/8) bytes, bit i of the stream = coefficient/entry i,
    // least significant bit of each byte first.
    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        const std::size_t nbytes = (n_ + 7) / 8;
        std::string s(nbytes * 2, '0');
        for (std::size_t b = 0; b < nbytes; ++b) {
            const std::uint8_t byte = static_cast<std::uint8_t>((w_[b >> 3] >> ((b & 7) * 8)) & 0xff);
            s[2 * b] = digits[byte >> 4];
            s[2 * b + 1] = digits[byte & 0xf];
        }
        return s;
    }

    static BitVector from_hex(const std::string& s, std::size_t nbits) {
        const std::size_t nbytes = (nbits + 7) / 8;
        if (s.size() != nbytes * 2) throw std::runtime_error("hex string has wrong length");
        BitVector v(nbits);
        auto nibble = [](char c) -> std::uint64_t {
            if (c >= '0' && c <= '9') return static_cast<std::uint64_t>(c - '0');
            if (c >= 'a' && c <= 'f') return static_cast<std::uint64_t>(c - 'a' + 10);
            if (c >= 'A' && c <= 'F') return static_cast<std::uint64_t>(c - 'A' + 10);
            throw std::runtime_error("invalid hex digit");
        };
        for (std::size_t b = 0; b < nbytes; ++b) {
            const std::uint64_t byte = (nibble(s[2 * b]) << 4) | nibble(s[2 * b + 1]);
            v.w_[b >> 3] |= byte << ((b & 7) * 8);
        }
        // reject set bits beyond nbits
        if (nbits % 64 != 0 && !v.w_.empty()) {
            const std::uint64_t mask = (~0ULL) >> (64 - (nbits % 64));
            if (v.w_.back() & ~mask) throw std::runtime_error("hex string sets bits past declared length");
        }
        return v;
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace mmce
