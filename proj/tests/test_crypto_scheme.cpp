#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "mmce/scheme.hpp"
#include "testutil.hpp"

using namespace mmce;

namespace {

KeyPair small_full_spectrum_key(std::uint32_t p, std::uint32_t t, std::uint64_t seed) {
    Rng rng(seed);
    return keygen(SchemeParams::full_spectrum(p, t), rng);
}

}  // namespace

TEST_CASE("keygen produces the full-spectrum shape") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 1);
    REQUIRE(kp.sk.params.r0 == 7);
    REQUIRE(kp.sk.params.n0 == 13);
    REQUIRE(kp.sk.H.all_monomial());
    REQUIRE(is_full_spectrum(distance_spectrum(kp.sk.W)));
    SECTION("every parity row has weight n0") {
        const BitMatrix dense = testutil::dense_from_blocks(kp.sk.H);
        for (std::size_t r = 0; r < dense.rows(); ++r) {
            std::size_t weight = 0;
            for (std::size_t c = 0; c < dense.cols(); ++c) weight += dense.get(r, c);
            REQUIRE(weight == 13);
        }
    }
}

TEST_CASE("public generator annihilates the parity check") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const KeyPair kp = small_full_spectrum_key(13, 3, seed);
        // H * G^T = 0 for G = [I | P], checked via syndromes of basis rows
        QcMatrix g(kp.pk.p, kp.pk.k0, kp.pk.k0 + kp.pk.r0);
        for (std::uint32_t u = 0; u < kp.pk.k0; ++u) {
            g.at(u, u) = CircPoly::one(kp.pk.p);
            for (std::uint32_t v = 0; v < kp.pk.r0; ++v) g.at(u, kp.pk.k0 + v) = kp.pk.P.at(u, v);
        }
        const BitMatrix gd = testutil::dense_from_blocks(g);
        for (std::size_t r = 0; r < gd.rows(); ++r) {
            BitVector row(gd.cols());
            for (std::size_t c = 0; c < gd.cols(); ++c) row.set(c, gd.get(r, c));
            REQUIRE_FALSE(qc_syndrome(kp.sk.H, row).any());
        }
    }
}

TEST_CASE("keygen is reproducible") {
    Rng a(77), b(77);
    const SchemeParams sp = SchemeParams::full_spectrum(13, 3);
    const KeyPair k1 = keygen(sp, a);
    const KeyPair k2 = keygen(sp, b);
    REQUIRE(k1.sk.W == k2.sk.W);
    REQUIRE(k1.pk.P == k2.pk.P);
    std::ostringstream f1, f2;
    save_private_key(f1, k1.sk);
    save_private_key(f2, k2.sk);
    REQUIRE(f1.str() == f2.str());
}

TEST_CASE("encryption basics") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 4);
    const std::size_t k = kp.pk.k_bits(), n = kp.pk.n_bits();
    SECTION("zero in, zero out") {
        const BitVector x = encrypt(kp.pk, BitVector(k), BitVector(n), 0);
        REQUIRE_FALSE(x.any());
    }
    SECTION("zero plaintext leaves only the error") {
        Rng rng(5);
        const BitVector e = BitVector::random_weight(n, 3, rng);
        REQUIRE(encrypt(kp.pk, BitVector(k), e) == e);
    }
    SECTION("dense and polynomial encryption paths agree") {
        Rng rng(6);
        const BitVector u = BitVector::random(k, rng);
        const BitVector e = BitVector::random_weight(n, 3, rng);
        PublicKey with_cache = kp.pk;
        with_cache.ensure_dense();
        REQUIRE(encrypt(kp.pk, u, e) == encrypt(with_cache, u, e));
    }
    SECTION("length and weight checks") {
        Rng rng(7);
        const BitVector u = BitVector::random(k, rng);
        REQUIRE_THROWS_AS(encrypt(kp.pk, BitVector(k + 1), BitVector(n), 0), std::invalid_argument);
        REQUIRE_THROWS_AS(encrypt(kp.pk, u, BitVector(n + 1), 0), std::invalid_argument);
        const BitVector e = BitVector::random_weight(n, 2, rng);  // wrong weight vs t = 3
        REQUIRE_THROWS_AS(encrypt(kp.pk, u, e), std::invalid_argument);
    }
}

TEST_CASE("noiseless round trip") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 8);
    Rng rng(9);
    for (int rep = 0; rep < 50; ++rep) {
        const BitVector u = BitVector::random(kp.pk.k_bits(), rng);
        const BitVector x = encrypt(kp.pk, u, BitVector(kp.pk.n_bits()), 0);
        const DecryptResult res = decrypt(kp.sk, x);
        REQUIRE(res.status == DecryptStatus::Ok);
        REQUIRE(res.u == u);
        REQUIRE(res.iterations == 0);
    }
}

TEST_CASE("single bit errors are corrected in one iteration") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 10);
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const BitVector u = BitVector::random(kp.pk.k_bits(), rng);
        BitVector e(kp.pk.n_bits());
        e.set(rng.below(kp.pk.n_bits()));
        const BitVector x = encrypt(kp.pk, u, e, 1);
        const DecryptResult res = decrypt(kp.sk, x);
        REQUIRE(res.status == DecryptStatus::Ok);
        REQUIRE(res.u == u);
        REQUIRE(res.iterations == 1);
    }
}

TEST_CASE("round trips at moderate weight") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 12);
    Rng rng(13);
    int ok = 0;
    const int trials = 500;
    for (int rep = 0; rep < trials; ++rep) {
        const BitVector u = BitVector::random(kp.pk.k_bits(), rng);
        const BitVector e = BitVector::random_weight(kp.pk.n_bits(), 3, rng);
        const BitVector x = encrypt(kp.pk, u, e);
        const DecryptResult res = decrypt(kp.sk, x);
        if (res.status == DecryptStatus::Ok) {
            REQUIRE(res.u == u);  // decoder never silently returns garbage here
            // re-encoding the plaintext must recover exactly the planted error
            const BitVector reenc = encrypt(kp.pk, res.u, BitVector(kp.pk.n_bits()), 0);
            REQUIRE((reenc ^ x).weight() == 3);
            ++ok;
        }
    }
    REQUIRE(ok > trials * 9 / 10);
}

TEST_CASE("decoder on a zero-syndrome input returns immediately") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 14);
    Rng rng(15);
    const BitVector u = BitVector::random(kp.pk.k_bits(), rng);
    const BitVector c = encrypt(kp.pk, u, BitVector(kp.pk.n_bits()), 0);
    const DecodeResult res = bit_flip_decode(kp.sk.H, c, kp.sk.params.decoder);
    REQUIRE(res.success);
    REQUIRE(res.iterations == 0);
    REQUIRE(res.corrected == c);
}

TEST_CASE("overwhelming error weight fails to decode") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 16);
    Rng rng(17);
    int failures = 0;
    const int trials = 200;
    const std::uint32_t heavy = static_cast<std::uint32_t>(kp.pk.n_bits() / 2);
    for (int rep = 0; rep < trials; ++rep) {
        const BitVector u = BitVector::random(kp.pk.k_bits(), rng);
        const BitVector e = BitVector::random_weight(kp.pk.n_bits(), heavy, rng);
        const DecryptResult res = decrypt(kp.sk, encrypt(kp.pk, u, e, heavy));
        if (res.status != DecryptStatus::Ok || res.u != u) ++failures;
    }
    REQUIRE(failures > trials * 99 / 100);
}

TEST_CASE("failure rate estimation") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 18);
    SECTION("zero weight never fails") {
        const DfrEstimate est = estimate_dfr(kp, 0, 200, 1);
        REQUIRE(est.failures == 0);
        REQUIRE(est.miscorrections == 0);
        REQUIRE(est.rate == 0.0);
    }
    SECTION("the all-ones error is the complement of a codeword") {
        // with odd n0 every check sees an odd number of flips, so the
        // majority rule flips every position back in one iteration
        const std::uint32_t n = static_cast<std::uint32_t>(kp.pk.n_bits());
        const DfrEstimate est = estimate_dfr(kp, n, 50, 2);
        REQUIRE(est.failures == 0);
        REQUIRE(est.miscorrections == 0);
    }
    SECTION("estimates are reproducible and schedule-independent") {
        const DfrEstimate a = estimate_dfr(kp, 8, 2000, 7);
        const DfrEstimate b = estimate_dfr(kp, 8, 2000, 7);
        REQUIRE(a.failures == b.failures);
        REQUIRE(a.miscorrections == b.miscorrections);
    }
    SECTION("confidence interval brackets the point estimate") {
        const DfrEstimate est = estimate_dfr(kp, 8, 500, 3);
        REQUIRE(est.ci_low <= est.rate);
        REQUIRE(est.rate <= est.ci_high);
    }
}

TEST_CASE("failure rate grows with the error weight") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 20);
    const std::uint64_t trials = 1500;
    DfrEstimate prev = estimate_dfr(kp, 2, trials, 5);
    for (std::uint32_t t : {6u, 10u, 14u}) {
        const DfrEstimate cur = estimate_dfr(kp, t, trials, 5);
        const double prev_all = prev.rate_with_miscorrections();
        const double cur_all = cur.rate_with_miscorrections();
        double lo_prev, hi_prev, lo_cur, hi_cur;
        wilson_interval(static_cast<std::uint64_t>(prev_all * trials), trials, lo_prev, hi_prev);
        wilson_interval(static_cast<std::uint64_t>(cur_all * trials), trials, lo_cur, hi_cur);
        REQUIRE(hi_cur >= lo_prev);  // no significant decrease
        prev = cur;
    }
}

TEST_CASE("sparse transformation round trip (m = 3)") {
    Rng rng(21);
    // the transformed error has weight up to m*t, so give the decoder a
    // fixed threshold; majority flipping is unstable at toy block counts
    SchemeParams sp = SchemeParams::generic(29, 5, 7, 1, /*m=*/3);
    sp.decoder.rule = ThresholdRule::Fixed;
    sp.decoder.fixed_threshold = 4;
    sp.decoder.max_iters = 20;
    const KeyPair kp = keygen(sp, rng);
    REQUIRE(kp.sk.Q.has_value());
    REQUIRE(kp.sk.Lsys.has_value());
    Rng trial(22);
    int ok = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const BitVector u = BitVector::random(kp.pk.k_bits(), trial);
        const BitVector e = BitVector::random_weight(kp.pk.n_bits(), 1, trial);
        const DecryptResult res = decrypt(kp.sk, encrypt(kp.pk, u, e));
        if (res.status == DecryptStatus::Ok) {
            REQUIRE(res.u == u);
            ++ok;
        }
    }
    REQUIRE(ok > 80);
    SECTION("Q has exact row weight m") {
        const BitMatrix qd = testutil::dense_from_blocks(*kp.sk.Q);
        for (std::size_t r = 0; r < qd.rows(); ++r) {
            std::size_t weight = 0;
            for (std::size_t c = 0; c < qd.cols(); ++c) weight += qd.get(r, c);
            REQUIRE(weight == 3);
        }
    }
}

TEST_CASE("key files round trip") {
    const KeyPair kp = small_full_spectrum_key(13, 3, 23);
    std::stringstream sks, pks;
    save_private_key(sks, kp.sk);
    save_public_key(pks, kp.pk);
    const PrivateKey sk2 = load_private_key(sks);
    const PublicKey pk2 = load_public_key(pks);
    REQUIRE(sk2.W == kp.sk.W);
    REQUIRE(sk2.params.t == kp.sk.params.t);
    REQUIRE(pk2.P == kp.pk.P);
    REQUIRE(pk2.t == kp.pk.t);
    SECTION("derived public key matches the generated one") {
        REQUIRE(public_from_private(sk2).P == kp.pk.P);
    }
    SECTION("corrupt headers are rejected") {
        std::stringstream bad("MONOMIAL-MCELIECE v2\n13 7 13 3 1\n");
        REQUIRE_THROWS(load_private_key(bad));
    }
}

TEST_CASE("private key files round trip with m = 3") {
    Rng rng(24);
    const SchemeParams sp = SchemeParams::generic(11, 3, 6, 2, /*m=*/3);
    const KeyPair kp = keygen(sp, rng);
    std::stringstream ss;
    save_private_key(ss, kp.sk);
    const PrivateKey sk2 = load_private_key(ss);
    REQUIRE(sk2.W == kp.sk.W);
    REQUIRE(*sk2.Q == *kp.sk.Q);
    REQUIRE(*sk2.Lsys == *kp.sk.Lsys);
    Rng trial(25);
    const BitVector u = BitVector::random(kp.pk.k_bits(), trial);
    const BitVector e = BitVector::random_weight(kp.pk.n_bits(), 2, trial);
    const BitVector x = encrypt(kp.pk, u, e);
    const DecryptResult a = decrypt(kp.sk, x);
    const DecryptResult b = decrypt(sk2, x);
    REQUIRE(a.status == b.status);
    if (a.status == DecryptStatus::Ok) REQUIRE(a.u == b.u);
}

TEST_CASE("scheme parameter validation") {
    REQUIRE_THROWS_AS(SchemeParams::full_spectrum(15, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(SchemeParams::generic(13, 2, 5, 3, /*m=*/2), std::invalid_argument);
    REQUIRE_THROWS_AS(SchemeParams::generic(13, 0, 5, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(SchemeParams::generic(13, 5, 5, 3), std::invalid_argument);
    REQUIRE_THROWS_AS(SchemeParams::generic(13, 2, 5, 0), std::invalid_argument);
}
