// Dense GF(2) matrices with word-packed rows; Gaussian elimination, rank and
// multi-RHS solving. Used for the circulant-restricted systematic solve and
// as the brute-force linear-algebra reference in tests.

#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmce/bitvec.hpp"

namespace mmce {

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), stride_((cols + 63) / 64), w_(rows * stride_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(std::size_t r, std::size_t c, bool v) {
        const std::uint64_t mask = 1ULL << (c & 63);
        if (v)
            row(r)[c >> 6] |= mask;
        else
            row(r)[c >> 6] &= ~mask;
    }
    void flip(std::size_t r, std::size_t c) { row(r)[c >> 6] ^= 1ULL << (c & 63); }

    std::uint64_t* row(std::size_t r) { return w_.data() + r * stride_; }
    const std::uint64_t* row(std::size_t r) const { return w_.data() + r * stride_; }

    void xor_rows(std::size_t dst, std::size_t src) {
        std::uint64_t* d = row(dst);
        const std::uint64_t* s = row(src);
        for (std::size_t i = 0; i < stride_; ++i) d[i] ^= s[i];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::uint64_t* ra = row(a);
        std::uint64_t* rb = row(b);
        for (std::size_t i = 0; i < stride_; ++i) std::swap(ra[i], rb[i]);
    }

    // v interpreted as a column vector of length cols(); returns A*v.
    BitVector mul_vec(const BitVector& v) const {
        if (v.size() != cols_) throw std::invalid_argument("BitMatrix::mul_vec: size mismatch");
        BitVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint64_t acc = 0;
            const std::uint64_t* rw = row(r);
            for (std::size_t i = 0; i < stride_; ++i) acc ^= rw[i] & v.words()[i];
            out.set(r, (std::popcount(acc) & 1) != 0);
        }
        return out;
    }

    // v interpreted as a row vector of length rows(); returns v*A.
    BitVector mul_row(const BitVector& v) const {
        if (v.size() != rows_) throw std::invalid_argument("BitMatrix::mul_row: size mismatch");
        BitVector out(cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (!v.get(r)) continue;
            std::uint64_t* ow = out.words();
            const std::uint64_t* rw = row(r);
            for (std::size_t i = 0; i < stride_; ++i) ow[i] ^= rw[i];
        }
        return out;
    }

    std::size_t rank() const {
        BitMatrix m(*this);
        return m.echelonize();
    }

    // In-place forward elimination; returns rank, records pivot column per
    // eliminated row in `pivots` when provided.
    std::size_t echelonize(std::vector<std::size_t>* pivots = nullptr) {
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
            std::size_t pivot = r;
            while (pivot < rows_ && !get(pivot, c)) ++pivot;
            if (pivot == rows_) continue;
            swap_rows(r, pivot);
            for (std::size_t rr = 0; rr < rows_; ++rr)
                if (rr != r && get(rr, c)) xor_rows(rr, r);
            if (pivots) pivots->push_back(c);
            ++r;
        }
        return r;
    }

    // Solve A*X = B over GF(2); free variables set to zero. Returns nullopt if
    // any RHS column is inconsistent.
    static std::optional<BitMatrix> solve(const BitMatrix& a, const BitMatrix& b) {
        if (a.rows() != b.rows()) throw std::invalid_argument("BitMatrix::solve: row mismatch");
        const std::size_t n = a.rows(), cols = a.cols(), rhs = b.cols();
        BitMatrix aug(n, cols + rhs);
        for (std::size_t r = 0; r < n; ++r) {
            const std::uint64_t* ar = a.row(r);
            std::uint64_t* gr = aug.row(r);
            for (std::size_t i = 0; i < a.stride_; ++i) gr[i] = ar[i];
            for (std::size_t c = 0; c < rhs; ++c)
                if (b.get(r, c)) aug.set(r, cols + c, true);
        }
        std::size_t rank = 0;
        std::vector<std::size_t> pivot_col;
        for (std::size_t c = 0; c < cols && rank < n; ++c) {
            std::size_t pivot = rank;
            while (pivot < n && !aug.get(pivot, c)) ++pivot;
            if (pivot == n) continue;
            aug.swap_rows(rank, pivot);
            for (std::size_t rr = 0; rr < n; ++rr)
                if (rr != rank && aug.get(rr, c)) aug.xor_rows(rr, rank);
            pivot_col.push_back(c);
            ++rank;
        }
        for (std::size_t r = rank; r < n; ++r)
            for (std::size_t c = 0; c < rhs; ++c)
                if (aug.get(r, cols + c)) return std::nullopt;
        BitMatrix x(cols, rhs);
        for (std::size_t r = 0; r < rank; ++r)
            for (std::size_t c = 0; c < rhs; ++c)
                if (aug.get(r, cols + c)) x.set(pivot_col[r], c, true);
        return x;
    }

private:
    std::size_t rows_ = 0, cols_ = 0, stride_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace mmce
