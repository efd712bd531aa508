// Quasi-cyclic block matrices over GF(2)[x]/(x^p - 1) and the linear algebra
// the cryptosystem needs: products, transposes, syndromes, dense expansion,
// and solving A*X = B for circulant-constrained X via one binary elimination.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mmce/bitmatrix.hpp"
#include "mmce/bitvec.hpp"
#include "mmce/circulant.hpp"

namespace mmce {

class QcMatrix {
public:
    QcMatrix() = default;
    QcMatrix(std::uint32_t p, std::uint32_t rows_b, std::uint32_t cols_b)
        : p_(p), rows_b_(rows_b), cols_b_(cols_b),
          blocks_(static_cast<std::size_t>(rows_b) * cols_b, CircPoly::zero(p)) {}

    static QcMatrix identity(std::uint32_t p, std::uint32_t nb) {
        QcMatrix m(p, nb, nb);
        for (std::uint32_t i = 0; i < nb; ++i) m.at(i, i) = CircPoly::one(p);
        return m;
    }

    std::uint32_t modulus() const { return p_; }
    std::uint32_t block_rows() const { return rows_b_; }
    std::uint32_t block_cols() const { return cols_b_; }
    std::size_t bit_rows() const { return static_cast<std::size_t>(rows_b_) * p_; }
    std::size_t bit_cols() const { return static_cast<std::size_t>(cols_b_) * p_; }

    CircPoly& at(std::uint32_t i, std::uint32_t j) { return blocks_[static_cast<std::size_t>(i) * cols_b_ + j]; }
    const CircPoly& at(std::uint32_t i, std::uint32_t j) const {
        return blocks_[static_cast<std::size_t>(i) * cols_b_ + j];
    }

    bool operator==(const QcMatrix&) const = default;

    bool all_monomial() const {
        for (const auto& b : blocks_)
            if (!b.is_monomial()) return false;
        return true;
    }

    QcMatrix transposed() const {
        QcMatrix out(p_, cols_b_, rows_b_);
        for (std::uint32_t i = 0; i < rows_b_; ++i)
            for (std::uint32_t j = 0; j < cols_b_; ++j) out.at(j, i) = at(i, j).transposed();
        return out;
    }

    QcMatrix submatrix(std::uint32_t row_b, std::uint32_t col_b, std::uint32_t nrows_b,
                       std::uint32_t ncols_b) const {
        QcMatrix out(p_, nrows_b, ncols_b);
        for (std::uint32_t i = 0; i < nrows_b; ++i)
            for (std::uint32_t j = 0; j < ncols_b; ++j) out.at(i, j) = at(row_b + i, col_b + j);
        return out;
    }

    bool is_identity() const {
        if (rows_b_ != cols_b_) return false;
        for (std::uint32_t i = 0; i < rows_b_; ++i)
            for (std::uint32_t j = 0; j < cols_b_; ++j) {
                if (i == j && !at(i, j).is_one()) return false;
                if (i != j && !at(i, j).is_zero()) return false;
            }
        return true;
    }

    // Dense binary expansion; block (i,j) expands to the circulant whose
    // first row is the block polynomial.
    BitMatrix expand() const {
        BitMatrix m(bit_rows(), bit_cols());
        for (std::uint32_t i = 0; i < rows_b_; ++i)
            for (std::uint32_t j = 0; j < cols_b_; ++j)
                for (std::uint32_t s : at(i, j).support())
                    for (std::uint32_t r = 0; r < p_; ++r) {
                        std::uint32_t c = r + s;
                        if (c >= p_) c -= p_;
                        m.set(static_cast<std::size_t>(i) * p_ + r, static_cast<std::size_t>(j) * p_ + c, true);
                    }
        return m;
    }

private:
    std::uint32_t p_ = 0, rows_b_ = 0, cols_b_ = 0;
    std::vector<CircPoly> blocks_;
};

inline QcMatrix qc_mul(const QcMatrix& a, const QcMatrix& b) {
    if (a.modulus() != b.modulus()) throw std::invalid_argument("qc_mul: mismatched moduli");
    if (a.block_cols() != b.block_rows()) throw std::invalid_argument("qc_mul: dimension mismatch");
    QcMatrix out(a.modulus(), a.block_rows(), b.block_cols());
    for (std::uint32_t i = 0; i < a.block_rows(); ++i)
        for (std::uint32_t j = 0; j < b.block_cols(); ++j) {
            CircPoly acc = CircPoly::zero(a.modulus());
            for (std::uint32_t k = 0; k < a.block_cols(); ++k) acc = acc + a.at(i, k) * b.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

// Syndrome s with s_i = sum_j v_j * H_{i,j}^T, v in QC form.
inline BitVector qc_syndrome(const QcMatrix& h, const BitVector& v) {
    const std::uint32_t p = h.modulus();
    if (v.size() != h.bit_cols()) throw std::invalid_argument("qc_syndrome: vector length mismatch");
    BitVector s(h.bit_rows());
    std::vector<DensePoly> vblocks;
    vblocks.reserve(h.block_cols());
    for (std::uint32_t j = 0; j < h.block_cols(); ++j)
        vblocks.push_back(DensePoly::from_bitvector_block(v, j, p));
    for (std::uint32_t i = 0; i < h.block_rows(); ++i) {
        DensePoly acc(p);
        for (std::uint32_t j = 0; j < h.block_cols(); ++j)
            accumulate_vec_times_circ(acc, vblocks[j], h.at(i, j).transposed());
        acc.paste_into(s, i);
    }
    return s;
}

// Row vector times QC matrix: (v*A)_j = sum_i v_i * A_{i,j}.
inline BitVector qc_vec_mul(const BitVector& v, const QcMatrix& a) {
    const std::uint32_t p = a.modulus();
    if (v.size() != a.bit_rows()) throw std::invalid_argument("qc_vec_mul: vector length mismatch");
    BitVector out(a.bit_cols());
    std::vector<DensePoly> vblocks;
    vblocks.reserve(a.block_rows());
    for (std::uint32_t i = 0; i < a.block_rows(); ++i)
        vblocks.push_back(DensePoly::from_bitvector_block(v, i, p));
    for (std::uint32_t j = 0; j < a.block_cols(); ++j) {
        DensePoly acc(p);
        for (std::uint32_t i = 0; i < a.block_rows(); ++i)
            accumulate_vec_times_circ(acc, vblocks[i], a.at(i, j));
        acc.paste_into(out, j);
    }
    return out;
}

// Solve A*X = B over the circulant ring, A square. The unknown bits are the
// block polynomials of X, one binary column per block column of B; free
// variables are fixed to zero, so the result is deterministic. Returns
// nullopt when some column is inconsistent (caller retries key generation).
inline std::optional<QcMatrix> qc_solve(const QcMatrix& a, const QcMatrix& b) {
    if (a.block_rows() != a.block_cols()) throw std::invalid_argument("qc_solve: A must be square");
    if (a.modulus() != b.modulus() || a.block_rows() != b.block_rows())
        throw std::invalid_argument("qc_solve: shape mismatch");
    const std::uint32_t p = a.modulus();
    const std::uint32_t nb = a.block_rows();
    const std::size_t n = static_cast<std::size_t>(nb) * p;

    // M[(i,sigma),(v,s)] = coeff of x^(sigma-s) in A_{i,v}
    BitMatrix m(n, n);
    for (std::uint32_t i = 0; i < nb; ++i)
        for (std::uint32_t v = 0; v < nb; ++v)
            for (std::uint32_t c : a.at(i, v).support())
                for (std::uint32_t s = 0; s < p; ++s) {
                    std::uint32_t sigma = s + c;
                    if (sigma >= p) sigma -= p;
                    m.set(static_cast<std::size_t>(i) * p + sigma, static_cast<std::size_t>(v) * p + s, true);
                }

    BitMatrix rhs(n, b.block_cols());
    for (std::uint32_t i = 0; i < nb; ++i)
        for (std::uint32_t vcol = 0; vcol < b.block_cols(); ++vcol)
            for (std::uint32_t sigma : b.at(i, vcol).support())
                rhs.set(static_cast<std::size_t>(i) * p + sigma, vcol, true);

    auto sol = BitMatrix::solve(m, rhs);
    if (!sol) return std::nullopt;

    QcMatrix x(p, nb, b.block_cols());
    for (std::uint32_t v = 0; v < nb; ++v)
        for (std::uint32_t vcol = 0; vcol < b.block_cols(); ++vcol) {
            std::vector<std::uint32_t> support;
            for (std::uint32_t s = 0; s < p; ++s)
                if (sol->get(static_cast<std::size_t>(v) * p + s, vcol)) support.push_back(s);
            x.at(v, vcol) = CircPoly(p, std::move(support));
        }
    return x;
}

// Systematic generator G = [I | P] with H*G^T = 0 for a monomial H; nullopt
// means the right block square of H admitted no circulant solution and the
// caller should redraw the key.
inline std::optional<QcMatrix> qc_nullspace_systematic(const QcMatrix& h) {
    const std::uint32_t r0 = h.block_rows();
    const std::uint32_t n0 = h.block_cols();
    if (n0 <= r0) throw std::invalid_argument("qc_nullspace_systematic: need more block columns than rows");
    const std::uint32_t k0 = n0 - r0;
    const std::uint32_t p = h.modulus();

    // With G = [I | P] and Y = P^T blockwise, H*G^T = 0 reads
    // sum_v H_{i,k0+v} * Y_{v,u} = H_{i,u}.
    const QcMatrix a = h.submatrix(0, k0, r0, r0);
    const QcMatrix c = h.submatrix(0, 0, r0, k0);
    auto y = qc_solve(a, c);
    if (!y) return std::nullopt;

    QcMatrix g(p, k0, n0);
    for (std::uint32_t u = 0; u < k0; ++u) {
        g.at(u, u) = CircPoly::one(p);
        for (std::uint32_t v = 0; v < r0; ++v) g.at(u, k0 + v) = y->at(v, u).transposed();
    }

    // defining property, checked bit-exactly
    const QcMatrix gt = g.transposed();
    for (std::uint32_t i = 0; i < r0; ++i)
        for (std::uint32_t u = 0; u < k0; ++u) {
            CircPoly acc = CircPoly::zero(p);
            for (std::uint32_t j = 0; j < n0; ++j) acc = acc + h.at(i, j) * gt.at(j, u);
            if (!acc.is_zero()) return std::nullopt;
        }
    return g;
}

}  // namespace mmce
