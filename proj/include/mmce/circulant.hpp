// Binary circulants as polynomials modulo x^p - 1.
//
// A p x p circulant is identified with the polynomial of its first row:
// products of circulants map to polynomial products, the transpose maps to
// the exponent negation s -> (p - s) mod p, and a length-p row vector times
// a circulant is the product of their polynomials. Sparse supports carry the
// key material (monomials); dense word vectors carry the hot loops.

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mmce/bitvec.hpp"

namespace mmce {

class CircPoly {
public:
    CircPoly() = default;
    explicit CircPoly(std::uint32_t p) : p_(p) {}
    CircPoly(std::uint32_t p, std::vector<std::uint32_t> support) : p_(p), supp_(std::move(support)) {
        normalize();
    }

    static CircPoly zero(std::uint32_t p) { return CircPoly(p); }
    static CircPoly one(std::uint32_t p) { return monomial(p, 0); }
    static CircPoly monomial(std::uint32_t p, std::uint32_t exp) { return CircPoly(p, {exp % p}); }

    std::uint32_t modulus() const { return p_; }
    const std::vector<std::uint32_t>& support() const { return supp_; }
    bool is_zero() const { return supp_.empty(); }
    std::size_t weight() const { return supp_.size(); }
    bool is_monomial() const { return supp_.size() == 1; }
    bool is_one() const { return supp_.size() == 1 && supp_[0] == 0; }

    bool operator==(const CircPoly&) const = default;

    CircPoly transposed() const {
        CircPoly out(p_);
        out.supp_.reserve(supp_.size());
        for (std::uint32_t s : supp_) out.supp_.push_back(s == 0 ? 0 : p_ - s);
        std::sort(out.supp_.begin(), out.supp_.end());
        return out;
    }

    friend CircPoly operator+(const CircPoly& a, const CircPoly& b) {
        check_moduli(a, b);
        CircPoly out(a.p_);
        std::set_symmetric_difference(a.supp_.begin(), a.supp_.end(), b.supp_.begin(), b.supp_.end(),
                                      std::back_inserter(out.supp_));
        return out;
    }

    friend CircPoly operator*(const CircPoly& a, const CircPoly& b) {
        check_moduli(a, b);
        const CircPoly& sparse = a.weight() <= b.weight() ? a : b;
        const CircPoly& other = a.weight() <= b.weight() ? b : a;
        std::vector<std::uint8_t> acc(a.p_, 0);
        for (std::uint32_t s : sparse.supp_)
            for (std::uint32_t t : other.supp_) {
                std::uint32_t e = s + t;
                if (e >= a.p_) e -= a.p_;
                acc[e] ^= 1;
            }
        CircPoly out(a.p_);
        for (std::uint32_t e = 0; e < a.p_; ++e)
            if (acc[e]) out.supp_.push_back(e);
        return out;
    }

    // Coefficients as a p-bit vector.
    BitVector to_bits() const {
        BitVector v(p_);
        for (std::uint32_t s : supp_) v.set(s);
        return v;
    }

    static CircPoly from_bits(const BitVector& v) {
        CircPoly out(static_cast<std::uint32_t>(v.size()));
        for (std::uint32_t s : v.support()) out.supp_.push_back(s);
        return out;
    }

private:
    static void check_moduli(const CircPoly& a, const CircPoly& b) {
        if (a.p_ != b.p_) throw std::invalid_argument("CircPoly: mismatched moduli");
    }
    void normalize() {
        for (auto& s : supp_) s %= p_;
        std::sort(supp_.begin(), supp_.end());
        supp_.erase(std::unique(supp_.begin(), supp_.end()), supp_.end());
    }

    std::uint32_t p_ = 0;
    std::vector<std::uint32_t> supp_;
};

// p-bit polynomial residue held in words; the workhorse for vector-times-
// circulant products inside encryption and decoding.
class DensePoly {
public:
    DensePoly() = default;
    explicit DensePoly(std::uint32_t p) : p_(p), w_((p + 63) / 64, 0) {}

    static DensePoly from_bitvector_block(const BitVector& v, std::size_t block, std::uint32_t p) {
        DensePoly out(p);
        for (std::uint32_t i = 0; i < p; ++i)
            if (v.get(block * p + i)) out.set(i);
        return out;
    }

    std::uint32_t modulus() const { return p_; }
    bool get(std::uint32_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::uint32_t i) { w_[i >> 6] |= 1ULL << (i & 63); }
    bool any() const {
        for (auto x : w_)
            if (x) return true;
        return false;
    }

    // acc ^= (this rotated left by shift), i.e. this * x^shift mod x^p - 1.
    void xor_rotated_into(DensePoly& acc, std::uint32_t shift) const {
        shift %= p_;
        if (shift == 0) {
            acc.xor_with(*this);
            return;
        }
        // bits [0, p-shift) land at [shift, p); bits [p-shift, p) wrap to [0, shift)
        xor_shifted_range(acc.w_, w_, 0, shift, p_ - shift);
        xor_shifted_range(acc.w_, w_, p_ - shift, 0, shift);
    }

    void xor_with(const DensePoly& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
    }

    std::vector<std::uint32_t> support() const {
        std::vector<std::uint32_t> out;
        for (std::size_t wi = 0; wi < w_.size(); ++wi) {
            std::uint64_t x = w_[wi];
            while (x) {
                out.push_back(static_cast<std::uint32_t>(wi * 64) +
                              static_cast<std::uint32_t>(std::countr_zero(x)));
                x &= x - 1;
            }
        }
        return out;
    }

    void paste_into(BitVector& v, std::size_t block) const {
        for (std::uint32_t i = 0; i < p_; ++i) v.set(block * p_ + i, get(i));
    }

private:
    // dst ^= src bits [src_lo, src_lo+len) placed at [dst_lo, dst_lo+len)
    static void xor_shifted_range(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src,
                                  std::uint32_t src_lo, std::uint32_t dst_lo, std::uint32_t len) {
        std::uint32_t done = 0;
        while (done < len) {
            const std::uint32_t chunk = std::min<std::uint32_t>(64, len - done);
            const std::uint32_t s = src_lo + done;
            std::uint64_t bits = src[s >> 6] >> (s & 63);
            if ((s & 63) != 0 && (s >> 6) + 1 < src.size()) bits |= src[(s >> 6) + 1] << (64 - (s & 63));
            if (chunk < 64) bits &= (~0ULL) >> (64 - chunk);
            const std::uint32_t d = dst_lo + done;
            dst[d >> 6] ^= bits << (d & 63);
            if ((d & 63) != 0 && (d >> 6) + 1 < dst.size()) dst[(d >> 6) + 1] ^= bits >> (64 - (d & 63));
            done += chunk;
        }
    }

    std::uint32_t p_ = 0;
    std::vector<std::uint64_t> w_;
};

// acc += v * C where v is a dense p-bit row polynomial and C is given by its
// first-row polynomial `c`; iterates over the sparse side.
inline void accumulate_vec_times_circ(DensePoly& acc, const DensePoly& v, const CircPoly& c) {
    for (std::uint32_t s : c.support()) v.xor_rotated_into(acc, s);
}

}  // namespace mmce
