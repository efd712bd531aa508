// Exponent matrices of monomial quasi-cyclic codes, their distance spectra,
// the full-spectrum construction, standard forms and row equivalence, plus
// exhaustive checks of the number-theoretic facts the construction rests on.

#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/qc_matrix.hpp"
#include "mmce/rng.hpp"

namespace mmce {

inline bool is_prime(std::uint32_t n) {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Cyclic distance min{+-(v1 - v2) mod p}; symmetric, in [0, p/2].
inline std::uint32_t distance(std::uint32_t v1, std::uint32_t v2, std::uint32_t p) {
    const std::uint32_t a = v1 % p, b = v2 % p;
    const std::uint32_t d = a >= b ? a - b : b - a;
    return std::min(d, p - d);
}

struct ExponentMatrix {
    std::uint32_t p = 0, r0 = 0, n0 = 0;
    std::vector<std::uint16_t> w;  // row-major, entries in [0, p)

    ExponentMatrix() = default;
    ExponentMatrix(std::uint32_t p_, std::uint32_t r0_, std::uint32_t n0_)
        : p(p_), r0(r0_), n0(n0_), w(static_cast<std::size_t>(r0_) * n0_, 0) {}

    std::uint16_t& at(std::uint32_t i, std::uint32_t j) { return w[static_cast<std::size_t>(i) * n0 + j]; }
    std::uint16_t at(std::uint32_t i, std::uint32_t j) const { return w[static_cast<std::size_t>(i) * n0 + j]; }

    bool operator==(const ExponentMatrix&) const = default;
};

struct ConstructionSecret {
    std::vector<std::uint16_t> y;  // length r0, entries in [0, p)
    std::vector<std::uint16_t> v;  // permutation of [0, p)
    std::vector<std::uint16_t> q;  // permutation of [0, floor(p/2)]
};

struct DistanceSpectrum {
    std::uint32_t p = 0, n0 = 0;
    // indexed by pair_index(i, j), each a sorted set of distances
    std::vector<std::vector<std::uint16_t>> sets;

    static std::size_t pair_count(std::uint32_t n0) { return static_cast<std::size_t>(n0) * (n0 - 1) / 2; }

    // (i, j) with i < j -> linear index, row-major over the strict upper triangle
    static std::size_t pair_index(std::uint32_t i, std::uint32_t j, std::uint32_t n0) {
        if (i >= j || j >= n0) throw std::invalid_argument("pair_index: need i < j < n0");
        return static_cast<std::size_t>(i) * n0 - static_cast<std::size_t>(i) * (i + 1) / 2 + (j - i - 1);
    }

    const std::vector<std::uint16_t>& at(std::uint32_t i, std::uint32_t j) const {
        return sets[pair_index(i, j, n0)];
    }
    bool contains(std::uint32_t i, std::uint32_t j, std::uint32_t d) const {
        const auto& s = at(i, j);
        return std::binary_search(s.begin(), s.end(), static_cast<std::uint16_t>(d));
    }

    bool operator==(const DistanceSpectrum&) const = default;
};

// Column formula w_{i,j} = y_i + v_j * q_i mod p over a full-length column
// permutation v and a half-range exponent multiplier permutation q; every
// output has the complete distance spectrum.
inline std::pair<ExponentMatrix, ConstructionSecret> build_exponent_matrix(std::uint32_t p, Rng& rng) {
    if (!is_prime(p)) throw std::invalid_argument("build_exponent_matrix: p must be prime");
    if (p < 5) throw std::invalid_argument("build_exponent_matrix: p must be at least 5");
    const std::uint32_t r0 = (p + 1) / 2;
    const std::uint32_t n0 = p;
    ConstructionSecret sec;
    sec.y.resize(r0);
    for (auto& yi : sec.y) yi = static_cast<std::uint16_t>(rng.below(p));
    sec.v = rng.permutation(0, static_cast<std::uint16_t>(p - 1));
    sec.q = rng.permutation(0, static_cast<std::uint16_t>(p / 2));
    ExponentMatrix w(p, r0, n0);
    for (std::uint32_t i = 0; i < r0; ++i)
        for (std::uint32_t j = 0; j < n0; ++j)
            w.at(i, j) = static_cast<std::uint16_t>(
                (sec.y[i] + static_cast<std::uint32_t>(sec.v[j]) * sec.q[i]) % p);
    return {std::move(w), std::move(sec)};
}

// Generic monomial code with uniform random exponents (no spectrum shaping).
inline ExponentMatrix random_monomial_matrix(std::uint32_t p, std::uint32_t r0, std::uint32_t n0, Rng& rng) {
    if (!is_prime(p)) throw std::invalid_argument("random_monomial_matrix: p must be prime");
    if (r0 == 0 || n0 <= r0) throw std::invalid_argument("random_monomial_matrix: need 0 < r0 < n0");
    ExponentMatrix w(p, r0, n0);
    for (auto& e : w.w) e = static_cast<std::uint16_t>(rng.below(p));
    return w;
}

inline DistanceSpectrum distance_spectrum(const ExponentMatrix& w) {
    DistanceSpectrum s;
    s.p = w.p;
    s.n0 = w.n0;
    s.sets.resize(DistanceSpectrum::pair_count(w.n0));
    for (std::uint32_t i = 0; i < w.n0; ++i)
        for (std::uint32_t j = i + 1; j < w.n0; ++j) {
            std::set<std::uint16_t> acc;
            for (std::uint32_t l = 0; l < w.r0; ++l)
                acc.insert(static_cast<std::uint16_t>(distance(w.at(l, i), w.at(l, j), w.p)));
            s.sets[DistanceSpectrum::pair_index(i, j, w.n0)].assign(acc.begin(), acc.end());
        }
    return s;
}

inline bool is_full_spectrum(const DistanceSpectrum& s) {
    const std::size_t full = static_cast<std::size_t>(s.p / 2) + 1;
    for (const auto& set : s.sets) {
        if (set.size() != full) return false;
        for (std::size_t d = 0; d < full; ++d)
            if (set[d] != d) return false;
    }
    return !s.sets.empty();
}

// Subtract column 0 from every column mod p; spectrum-preserving.
inline ExponentMatrix standard_form(const ExponentMatrix& w) {
    ExponentMatrix out(w.p, w.r0, w.n0);
    for (std::uint32_t i = 0; i < w.r0; ++i) {
        const std::uint32_t base = w.at(i, 0);
        for (std::uint32_t j = 0; j < w.n0; ++j)
            out.at(i, j) = static_cast<std::uint16_t>((w.at(i, j) + w.p - base) % w.p);
    }
    return out;
}

// True iff the rows of a are a permutation of the rows of b.
inline bool row_equivalent(const ExponentMatrix& a, const ExponentMatrix& b) {
    if (a.p != b.p || a.r0 != b.r0 || a.n0 != b.n0)
        throw std::invalid_argument("row_equivalent: dimension mismatch");
    std::vector<std::vector<std::uint16_t>> ra(a.r0), rb(b.r0);
    for (std::uint32_t i = 0; i < a.r0; ++i) {
        ra[i].assign(a.w.begin() + static_cast<std::ptrdiff_t>(i) * a.n0,
                     a.w.begin() + static_cast<std::ptrdiff_t>(i + 1) * a.n0);
        rb[i].assign(b.w.begin() + static_cast<std::ptrdiff_t>(i) * b.n0,
                     b.w.begin() + static_cast<std::ptrdiff_t>(i + 1) * b.n0);
    }
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    return ra == rb;
}

// Scaling a permutation z of [1, p-1] by every alpha in [1, p-1] mod p yields
// p-1 pairwise distinct sequences, each itself a permutation of [1, p-1].
// Exhaustive check.
inline bool check_scaled_permutations_distinct(std::uint32_t p, Rng& rng) {
    if (!is_prime(p)) throw std::invalid_argument("check_scaled_permutations_distinct: p must be prime");
    const std::vector<std::uint16_t> z = rng.permutation(1, static_cast<std::uint16_t>(p - 1));
    std::set<std::vector<std::uint16_t>> seen;
    for (std::uint32_t alpha = 1; alpha < p; ++alpha) {
        std::vector<std::uint16_t> img(z.size());
        std::set<std::uint16_t> values;
        for (std::size_t i = 0; i < z.size(); ++i) {
            img[i] = static_cast<std::uint16_t>((alpha * z[i]) % p);
            values.insert(img[i]);
        }
        if (values.size() != p - 1 || values.count(0) != 0) return false;
        if (!seen.insert(std::move(img)).second) return false;
    }
    return seen.size() == p - 1;
}

// For every alpha in [2, floor(p/2)] some beta in the same range pushes the
// product alpha*beta mod p above floor(p/2). Exhaustive check.
inline bool check_product_exceeds_half(std::uint32_t p) {
    if (!is_prime(p) || p < 5) throw std::invalid_argument("check_product_exceeds_half: p must be prime >= 5");
    const std::uint32_t half = p / 2;
    for (std::uint32_t alpha = 2; alpha <= half; ++alpha) {
        bool found = false;
        for (std::uint32_t beta = 2; beta <= half && !found; ++beta)
            if ((alpha * beta) % p > half) found = true;
        if (!found) return false;
    }
    return true;
}

// log2((p-1)!) by exact summation; the size of the standard-form candidate
// space an attacker faces.
inline double count_candidates_log2(std::uint32_t p) {
    if (p < 3) throw std::invalid_argument("count_candidates_log2: p must be at least 3");
    double acc = 0.0;
    for (std::uint32_t i = 2; i <= p - 1; ++i) acc += std::log2(static_cast<double>(i));
    return acc;
}

// Monomial parity-check matrix with blocks x^{w_{i,j}}.
inline QcMatrix expand_parity_check(const ExponentMatrix& w) {
    QcMatrix h(w.p, w.r0, w.n0);
    for (std::uint32_t i = 0; i < w.r0; ++i)
        for (std::uint32_t j = 0; j < w.n0; ++j) h.at(i, j) = CircPoly::monomial(w.p, w.at(i, j));
    return h;
}

inline void write_exponent_matrix(std::ostream& os, const ExponentMatrix& w) {
    os << w.p << ' ' << w.r0 << ' ' << w.n0 << '\n';
    for (std::uint32_t i = 0; i < w.r0; ++i) {
        for (std::uint32_t j = 0; j < w.n0; ++j) os << (j ? " " : "") << w.at(i, j);
        os << '\n';
    }
}

inline constexpr const char* kSpectrumFileHeader = "MONOMIAL-SPECTRUM v1";

inline void write_spectrum(std::ostream& os, const DistanceSpectrum& s) {
    os << kSpectrumFileHeader << '\n';
    os << s.p << ' ' << s.n0 << '\n';
    for (std::uint32_t i = 0; i < s.n0; ++i)
        for (std::uint32_t j = i + 1; j < s.n0; ++j) {
            os << i << ' ' << j << " :";
            for (std::uint16_t d : s.at(i, j)) os << ' ' << d;
            os << '\n';
        }
}

inline DistanceSpectrum read_spectrum(std::istream& is) {
    std::string header;
    if (!std::getline(is, header) || header != kSpectrumFileHeader)
        throw std::runtime_error("spectrum file: bad header");
    DistanceSpectrum s;
    if (!(is >> s.p >> s.n0) || s.n0 < 2 || s.p < 2) throw std::runtime_error("spectrum file: bad dimensions");
    s.sets.resize(DistanceSpectrum::pair_count(s.n0));
    std::string line;
    std::getline(is, line);
    std::vector<bool> seen(s.sets.size(), false);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const std::size_t colon = line.find(':');
        if (colon == std::string::npos) throw std::runtime_error("spectrum file: missing ':'");
        std::istringstream head(line.substr(0, colon));
        std::uint32_t i = 0, j = 0;
        if (!(head >> i >> j)) throw std::runtime_error("spectrum file: bad pair");
        std::istringstream tail(line.substr(colon + 1));
        std::vector<std::uint16_t> set;
        std::uint32_t d = 0;
        while (tail >> d) {
            if (d > s.p / 2) throw std::runtime_error("spectrum file: distance out of range");
            set.push_back(static_cast<std::uint16_t>(d));
        }
        std::sort(set.begin(), set.end());
        set.erase(std::unique(set.begin(), set.end()), set.end());
        const std::size_t idx = DistanceSpectrum::pair_index(i, j, s.n0);
        s.sets[idx] = std::move(set);
        seen[idx] = true;
    }
    for (bool ok : seen)
        if (!ok) throw std::runtime_error("spectrum file: missing pair line");
    return s;
}

inline ExponentMatrix read_exponent_matrix(std::istream& is) {
    std::uint32_t p = 0, r0 = 0, n0 = 0;
    if (!(is >> p >> r0 >> n0)) throw std::runtime_error("exponent matrix: bad header");
    if (r0 == 0 || n0 == 0 || p == 0) throw std::runtime_error("exponent matrix: bad dimensions");
    ExponentMatrix w(p, r0, n0);
    for (std::uint32_t i = 0; i < r0; ++i)
        for (std::uint32_t j = 0; j < n0; ++j) {
            std::uint32_t e = 0;
            if (!(is >> e)) throw std::runtime_error("exponent matrix: truncated entries");
            if (e >= p) throw std::runtime_error("exponent matrix: entry out of range");
            w.at(i, j) = static_cast<std::uint16_t>(e);
        }
    return w;
}

}  // namespace mmce
