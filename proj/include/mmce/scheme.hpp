// The McEliece-style scheme over monomial codes: key generation, encryption,
// bit-flipping decryption and Monte-Carlo decoding-failure-rate estimation.
//
// Scrambling is fixed to the identity; the sparse transformation Q defaults
// to the identity (m = 1) and is only applied when a row/column weight m > 1
// is requested. Decoding failures are first-class results, never exceptions:
// the failure signal is exactly what a reaction attacker observes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/bitmatrix.hpp"
#include "mmce/bitvec.hpp"
#include "mmce/exponent_matrix.hpp"
#include "mmce/parallel.hpp"
#include "mmce/qc_matrix.hpp"
#include "mmce/rng.hpp"

namespace mmce {

enum class ThresholdRule : std::uint8_t { Majority, Fixed };

struct DecoderConfig {
    std::uint32_t max_iters = 10;
    ThresholdRule rule = ThresholdRule::Majority;
    std::uint32_t fixed_threshold = 0;  // only read when rule == Fixed
};

enum class KeyMode : std::uint8_t { FullSpectrum, Generic };

struct SchemeParams {
    std::uint32_t p = 0;
    std::uint32_t r0 = 0;
    std::uint32_t n0 = 0;
    std::uint32_t t = 0;
    std::uint32_t m = 1;
    KeyMode mode = KeyMode::FullSpectrum;
    DecoderConfig decoder;

    static SchemeParams full_spectrum(std::uint32_t p, std::uint32_t t, std::uint32_t m = 1) {
        SchemeParams sp;
        sp.p = p;
        sp.r0 = (p + 1) / 2;
        sp.n0 = p;
        sp.t = t;
        sp.m = m;
        sp.mode = KeyMode::FullSpectrum;
        sp.validate();
        return sp;
    }

    static SchemeParams generic(std::uint32_t p, std::uint32_t r0, std::uint32_t n0, std::uint32_t t,
                                std::uint32_t m = 1) {
        SchemeParams sp;
        sp.p = p;
        sp.r0 = r0;
        sp.n0 = n0;
        sp.t = t;
        sp.m = m;
        sp.mode = KeyMode::Generic;
        sp.validate();
        return sp;
    }

    std::uint32_t k0() const { return n0 - r0; }
    std::size_t n_bits() const { return static_cast<std::size_t>(n0) * p; }
    std::size_t k_bits() const { return static_cast<std::size_t>(k0()) * p; }
    std::size_t r_bits() const { return static_cast<std::size_t>(r0) * p; }

    void validate() const {
        if (!is_prime(p)) throw std::invalid_argument("SchemeParams: p must be prime");
        if (t < 1) throw std::invalid_argument("SchemeParams: t must be at least 1");
        if (m < 1) throw std::invalid_argument("SchemeParams: m must be at least 1");
        // an exact-weight transform with even row sums annihilates the
        // all-ones vector over GF(2), so it can never be inverted
        if (m % 2 == 0) throw std::invalid_argument("SchemeParams: m must be odd");
        if (r0 == 0 || n0 < r0 + 1) throw std::invalid_argument("SchemeParams: need n0 >= r0 + 1");
        if (mode == KeyMode::FullSpectrum && (p < 5 || r0 != (p + 1) / 2 || n0 != p))
            throw std::invalid_argument("SchemeParams: full-spectrum shape requires r0 = ceil(p/2), n0 = p");
    }
};

struct PrivateKey {
    SchemeParams params;
    ExponentMatrix W;
    QcMatrix H;                                // expansion of W
    std::optional<QcMatrix> Q;                 // present iff m > 1
    std::optional<QcMatrix> Lsys;              // m > 1: u = u' * Lsys
    std::optional<ConstructionSecret> secret;  // full-spectrum construction randomness
};

struct PublicKey {
    std::uint32_t p = 0, k0 = 0, r0 = 0, t = 0, m = 1;
    QcMatrix P;  // generator is [I | P], k0 x r0 blocks

    std::size_t n_bits() const { return static_cast<std::size_t>(k0 + r0) * p; }
    std::size_t k_bits() const { return static_cast<std::size_t>(k0) * p; }
    std::size_t r_bits() const { return static_cast<std::size_t>(r0) * p; }

    // Optional dense expansion of P for hot encryption loops. Call once
    // before sharing the key across workers; encrypt itself never mutates.
    void ensure_dense() {
        if (!dense_) dense_ = std::make_shared<BitMatrix>(P.expand());
    }
    const BitMatrix* dense() const { return dense_.get(); }

private:
    std::shared_ptr<const BitMatrix> dense_;
};

struct KeyPair {
    PrivateKey sk;
    PublicKey pk;
};

// ---------------------------------------------------------------------------
// decoding

struct DecodeResult {
    bool success = false;
    BitVector corrected;
    std::uint32_t iterations = 0;
};

// Parallel bit flipping: per iteration, count unsatisfied checks per bit
// against the frozen syndrome and flip every bit that meets the threshold.
// Deterministic given inputs.
inline DecodeResult bit_flip_decode(const QcMatrix& h, const BitVector& x, const DecoderConfig& cfg) {
    const std::uint32_t p = h.modulus();
    const std::uint32_t r0 = h.block_rows();
    const std::uint32_t n0 = h.block_cols();
    if (x.size() != h.bit_cols()) throw std::invalid_argument("bit_flip_decode: length mismatch");

    std::vector<std::vector<std::uint32_t>> supports(static_cast<std::size_t>(r0) * n0);
    std::vector<std::uint32_t> col_weight(n0, 0);
    for (std::uint32_t i = 0; i < r0; ++i)
        for (std::uint32_t j = 0; j < n0; ++j) {
            supports[static_cast<std::size_t>(i) * n0 + j] = h.at(i, j).support();
            col_weight[j] += static_cast<std::uint32_t>(supports[static_cast<std::size_t>(i) * n0 + j].size());
        }

    DecodeResult res;
    res.corrected = x;
    BitVector synd(h.bit_rows());
    // check (i, rho) contains bit (j, c) iff c = rho + s for s in supp(H_ij)
    auto toggle_checks = [&](std::size_t beta) {
        const std::uint32_t j = static_cast<std::uint32_t>(beta / p);
        const std::uint32_t c = static_cast<std::uint32_t>(beta % p);
        for (std::uint32_t i = 0; i < r0; ++i)
            for (std::uint32_t s : supports[static_cast<std::size_t>(i) * n0 + j]) {
                const std::uint32_t rho = c >= s ? c - s : c + p - s;
                synd.flip(static_cast<std::size_t>(i) * p + rho);
            }
    };
    for (std::uint32_t beta : res.corrected.support()) toggle_checks(beta);

    std::vector<std::size_t> flips;
    for (res.iterations = 0; res.iterations < cfg.max_iters; ++res.iterations) {
        if (!synd.any()) {
            res.success = true;
            return res;
        }
        flips.clear();
        for (std::uint32_t j = 0; j < n0; ++j) {
            const std::uint32_t threshold =
                cfg.rule == ThresholdRule::Majority ? col_weight[j] / 2 + 1 : cfg.fixed_threshold;
            for (std::uint32_t c = 0; c < p; ++c) {
                std::uint32_t unsat = 0;
                for (std::uint32_t i = 0; i < r0; ++i)
                    for (std::uint32_t s : supports[static_cast<std::size_t>(i) * n0 + j]) {
                        const std::uint32_t rho = c >= s ? c - s : c + p - s;
                        unsat += synd.get(static_cast<std::size_t>(i) * p + rho);
                    }
                if (unsat >= threshold && unsat > 0) flips.push_back(static_cast<std::size_t>(j) * p + c);
            }
        }
        if (flips.empty()) break;  // stalled
        for (std::size_t beta : flips) {
            res.corrected.flip(beta);
            toggle_checks(beta);
        }
    }
    res.success = !synd.any();
    return res;
}

// ---------------------------------------------------------------------------
// key generation

namespace detail {

struct DerivedPublic {
    QcMatrix P;                 // k0 x r0 blocks
    std::optional<QcMatrix> L;  // systematizer, present iff Q given
};

// [I | P] from the parity check; with Q, systematizes G * Q^{-1} and reports
// the block matrix L with u = u' * L.
inline std::optional<DerivedPublic> derive_public(const QcMatrix& h, const std::optional<QcMatrix>& q) {
    const std::uint32_t r0 = h.block_rows();
    const std::uint32_t n0 = h.block_cols();
    const std::uint32_t k0 = n0 - r0;
    const std::uint32_t p = h.modulus();
    auto g = qc_nullspace_systematic(h);
    if (!g) return std::nullopt;
    if (!q) return DerivedPublic{g->submatrix(0, k0, k0, r0), std::nullopt};
    auto qinv = qc_solve(*q, QcMatrix::identity(p, n0));
    if (!qinv) return std::nullopt;
    const QcMatrix a = qc_mul(*g, *qinv);
    const QcMatrix l = a.submatrix(0, 0, k0, k0);
    auto linv = qc_solve(l, QcMatrix::identity(p, k0));
    if (!linv) return std::nullopt;
    const QcMatrix gpub = qc_mul(*linv, a);
    if (!gpub.submatrix(0, 0, k0, k0).is_identity()) return std::nullopt;
    return DerivedPublic{gpub.submatrix(0, k0, k0, r0), l};
}

inline QcMatrix random_weight_m_transform(std::uint32_t p, std::uint32_t n0, std::uint32_t m, Rng& rng) {
    std::vector<std::uint32_t> block_weight(n0, 0);
    for (std::uint32_t k = 0; k < m; ++k) block_weight[static_cast<std::size_t>(rng.below(n0))]++;
    QcMatrix q(p, n0, n0);
    for (std::uint32_t i = 0; i < n0; ++i)
        for (std::uint32_t j = 0; j < n0; ++j) {
            const std::uint32_t bw = block_weight[(j + n0 - i) % n0];
            if (bw == 0) continue;
            std::vector<std::uint32_t> support;
            for (std::uint32_t s : rng.distinct(p, bw)) support.push_back(s);
            q.at(i, j) = CircPoly(p, std::move(support));
        }
    return q;
}

}  // namespace detail

inline KeyPair keygen(const SchemeParams& params, Rng& rng, std::uint32_t max_retries = 100) {
    params.validate();
    for (std::uint32_t attempt = 0; attempt < max_retries; ++attempt) {
        PrivateKey sk;
        sk.params = params;
        if (params.mode == KeyMode::FullSpectrum) {
            auto [w, secret] = build_exponent_matrix(params.p, rng);
            sk.W = std::move(w);
            sk.secret = std::move(secret);
        } else {
            sk.W = random_monomial_matrix(params.p, params.r0, params.n0, rng);
        }
        sk.H = expand_parity_check(sk.W);
        if (params.m > 1) sk.Q = detail::random_weight_m_transform(params.p, params.n0, params.m, rng);

        auto derived = detail::derive_public(sk.H, sk.Q);
        if (!derived) continue;
        sk.Lsys = derived->L;

        PublicKey pk;
        pk.p = params.p;
        pk.k0 = params.k0();
        pk.r0 = params.r0;
        pk.t = params.t;
        pk.m = params.m;
        pk.P = std::move(derived->P);
        return {std::move(sk), std::move(pk)};
    }
    throw std::runtime_error("keygen: retry budget exhausted");
}

// Recompute the public half from a private key (one elimination).
inline PublicKey public_from_private(const PrivateKey& sk) {
    auto derived = detail::derive_public(sk.H, sk.Q);
    if (!derived) throw std::runtime_error("public_from_private: key is not systematizable");
    PublicKey pk;
    pk.p = sk.params.p;
    pk.k0 = sk.params.k0();
    pk.r0 = sk.params.r0;
    pk.t = sk.params.t;
    pk.m = sk.params.m;
    pk.P = std::move(derived->P);
    return pk;
}

// ---------------------------------------------------------------------------
// encryption / decryption

inline BitVector encrypt(const PublicKey& pk, const BitVector& u, const BitVector& e,
                         std::optional<std::uint32_t> expected_weight = std::nullopt) {
    if (u.size() != pk.k_bits()) throw std::invalid_argument("encrypt: plaintext length mismatch");
    if (e.size() != pk.n_bits()) throw std::invalid_argument("encrypt: error vector length mismatch");
    const std::uint32_t want = expected_weight ? *expected_weight : pk.t;
    if (e.weight() != want) throw std::invalid_argument("encrypt: error vector has wrong weight");

    BitVector x(pk.n_bits());
    x.paste(0, u);
    if (const BitMatrix* dense = pk.dense()) {
        BitVector tail = dense->mul_row(u);
        x.paste(pk.k_bits(), tail);
    } else {
        BitVector tail = qc_vec_mul(u, pk.P);
        x.paste(pk.k_bits(), tail);
    }
    x ^= e;
    return x;
}

enum class DecryptStatus : std::uint8_t { Ok, Failure };

struct DecryptResult {
    DecryptStatus status = DecryptStatus::Failure;
    BitVector u;  // valid iff status == Ok
    std::uint32_t iterations = 0;
};

inline DecryptResult decrypt(const PrivateKey& sk, const BitVector& x) {
    if (x.size() != sk.params.n_bits()) throw std::invalid_argument("decrypt: ciphertext length mismatch");
    const BitVector xprime = sk.Q ? qc_vec_mul(x, *sk.Q) : x;
    DecodeResult dec = bit_flip_decode(sk.H, xprime, sk.params.decoder);
    DecryptResult out;
    out.iterations = dec.iterations;
    if (!dec.success) return out;
    out.status = DecryptStatus::Ok;
    BitVector uprime = dec.corrected.slice(0, sk.params.k_bits());
    out.u = sk.Lsys ? qc_vec_mul(uprime, *sk.Lsys) : std::move(uprime);
    return out;
}

// ---------------------------------------------------------------------------
// Monte-Carlo DFR estimation

struct DfrEstimate {
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;        // decoder did not converge
    std::uint64_t miscorrections = 0;  // converged to the wrong plaintext
    double rate = 0.0;                 // failures / trials
    double ci_low = 0.0, ci_high = 0.0;

    double rate_with_miscorrections() const {
        return trials ? static_cast<double>(failures + miscorrections) / static_cast<double>(trials) : 0.0;
    }
};

// 95% Wilson score interval for a binomial proportion.
inline void wilson_interval(std::uint64_t successes, std::uint64_t n, double& lo, double& hi) {
    if (n == 0) {
        lo = hi = 0.0;
        return;
    }
    const double z = 1.959963984540054;
    const double phat = static_cast<double>(successes) / static_cast<double>(n);
    const double denom = 1.0 + z * z / static_cast<double>(n);
    const double center = (phat + z * z / (2.0 * static_cast<double>(n))) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) +
                      z * z / (4.0 * static_cast<double>(n) * static_cast<double>(n))) /
        denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

inline DfrEstimate estimate_dfr(const KeyPair& kp, std::uint32_t t, std::uint64_t trials, std::uint64_t seed) {
    KeyPair local = kp;  // shallow; dense cache shared
    local.pk.ensure_dense();
    struct Counts {
        std::uint64_t failures = 0, miscorrections = 0;
    };
    auto states = parallel_chunked<Counts>(trials, 1024, [&](Counts& st, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t idx = lo; idx < hi; ++idx) {
            Rng rng = Rng::stream(seed, idx);
            const BitVector u = BitVector::random(local.pk.k_bits(), rng);
            const BitVector e = BitVector::random_weight(local.pk.n_bits(), t, rng);
            const BitVector x = encrypt(local.pk, u, e, t);
            const DecryptResult res = decrypt(local.sk, x);
            if (res.status != DecryptStatus::Ok)
                st.failures++;
            else if (res.u != u)
                st.miscorrections++;
        }
    });
    DfrEstimate est;
    est.trials = trials;
    for (const auto& st : states) {
        est.failures += st.failures;
        est.miscorrections += st.miscorrections;
    }
    est.rate = trials ? static_cast<double>(est.failures) / static_cast<double>(trials) : 0.0;
    wilson_interval(est.failures, trials, est.ci_low, est.ci_high);
    return est;
}

// ---------------------------------------------------------------------------
// key files

inline constexpr const char* kKeyFileHeader = "MONOMIAL-MCELIECE v1";

inline void save_private_key(std::ostream& os, const PrivateKey& sk) {
    os << kKeyFileHeader << '\n';
    os << sk.params.p << ' ' << sk.params.r0 << ' ' << sk.params.n0 << ' ' << sk.params.t << ' '
       << sk.params.m << '\n';
    for (std::uint32_t i = 0; i < sk.W.r0; ++i) {
        for (std::uint32_t j = 0; j < sk.W.n0; ++j) os << (j ? " " : "") << sk.W.at(i, j);
        os << '\n';
    }
    if (sk.params.m > 1) {
        for (std::uint32_t i = 0; i < sk.params.n0; ++i)
            for (std::uint32_t j = 0; j < sk.params.n0; ++j) os << sk.Q->at(i, j).to_bits().to_hex() << '\n';
    }
}

namespace detail {

inline void read_key_header(std::istream& is, SchemeParams& params) {
    std::string header;
    if (!std::getline(is, header) || header != kKeyFileHeader)
        throw std::runtime_error("key file: bad header");
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("key file: missing parameter line");
    std::istringstream ls(line);
    if (!(ls >> params.p >> params.r0 >> params.n0 >> params.t >> params.m))
        throw std::runtime_error("key file: bad parameter line");
    params.mode = (params.n0 == params.p && params.r0 == (params.p + 1) / 2) ? KeyMode::FullSpectrum
                                                                             : KeyMode::Generic;
    params.validate();
}

}  // namespace detail

// Rebuilds every derived component (H; for m > 1 also G, Q^{-1} and the
// systematizer), so loading a large-p key pays one elimination.
inline PrivateKey load_private_key(std::istream& is) {
    PrivateKey sk;
    detail::read_key_header(is, sk.params);
    sk.W = ExponentMatrix(sk.params.p, sk.params.r0, sk.params.n0);
    for (std::uint32_t i = 0; i < sk.params.r0; ++i)
        for (std::uint32_t j = 0; j < sk.params.n0; ++j) {
            std::uint32_t e = 0;
            if (!(is >> e) || e >= sk.params.p) throw std::runtime_error("key file: bad exponent");
            sk.W.at(i, j) = static_cast<std::uint16_t>(e);
        }
    sk.H = expand_parity_check(sk.W);
    if (sk.params.m > 1) {
        std::string line;
        std::getline(is, line);  // consume end of last exponent row
        QcMatrix q(sk.params.p, sk.params.n0, sk.params.n0);
        for (std::uint32_t i = 0; i < sk.params.n0; ++i)
            for (std::uint32_t j = 0; j < sk.params.n0; ++j) {
                if (!std::getline(is, line)) throw std::runtime_error("key file: missing Q block");
                q.at(i, j) = CircPoly::from_bits(BitVector::from_hex(line, sk.params.p));
            }
        sk.Q = std::move(q);
        auto derived = detail::derive_public(sk.H, sk.Q);
        if (!derived) throw std::runtime_error("key file: stored key is not systematizable");
        sk.Lsys = derived->L;
    }
    return sk;
}

inline void save_public_key(std::ostream& os, const PublicKey& pk) {
    os << kKeyFileHeader << '\n';
    os << pk.p << ' ' << pk.r0 << ' ' << (pk.k0 + pk.r0) << ' ' << pk.t << ' ' << pk.m << '\n';
    for (std::uint32_t u = 0; u < pk.k0; ++u)
        for (std::uint32_t v = 0; v < pk.r0; ++v) os << pk.P.at(u, v).to_bits().to_hex() << '\n';
}

inline PublicKey load_public_key(std::istream& is) {
    SchemeParams params;
    detail::read_key_header(is, params);
    PublicKey pk;
    pk.p = params.p;
    pk.r0 = params.r0;
    pk.k0 = params.k0();
    pk.t = params.t;
    pk.m = params.m;
    pk.P = QcMatrix(params.p, pk.k0, pk.r0);
    std::string line;
    for (std::uint32_t u = 0; u < pk.k0; ++u)
        for (std::uint32_t v = 0; v < pk.r0; ++v) {
            if (!std::getline(is, line)) throw std::runtime_error("key file: missing generator block");
            pk.P.at(u, v) = CircPoly::from_bits(BitVector::from_hex(line, params.p));
        }
    return pk;
}

}  // namespace mmce
