#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "mmce/qc_matrix.hpp"
#include "mmce/rng.hpp"
#include "testutil.hpp"

using namespace mmce;

namespace {

CircPoly random_poly(std::uint32_t p, Rng& rng) {
    std::vector<std::uint32_t> supp;
    for (std::uint32_t e = 0; e < p; ++e)
        if (rng.below(2)) supp.push_back(e);
    return CircPoly(p, std::move(supp));
}

}  // namespace

TEST_CASE("circulant product basics") {
    SECTION("monomial exponents add mod p") {
        const CircPoly a = CircPoly::monomial(5, 2);
        const CircPoly b = CircPoly::monomial(5, 3);
        REQUIRE(a * b == CircPoly::one(5));
    }
    SECTION("multiplicative identity") {
        Rng rng(7);
        for (int rep = 0; rep < 20; ++rep) {
            const CircPoly a = random_poly(13, rng);
            REQUIRE(a * CircPoly::one(13) == a);
        }
    }
    SECTION("binary squaring cancels cross terms") {
        const CircPoly a(7, {0, 1});  // 1 + x
        const CircPoly sq = a * a;
        REQUIRE(sq == CircPoly(7, {0, 2}));
    }
    SECTION("mismatched moduli rejected") {
        REQUIRE_THROWS_AS(CircPoly::one(5) * CircPoly::one(7), std::invalid_argument);
    }
}

TEST_CASE("circulant product is commutative and associative") {
    Rng rng(42);
    for (std::uint32_t p : {5u, 17u, 31u}) {
        for (int rep = 0; rep < 50; ++rep) {
            const CircPoly a = random_poly(p, rng);
            const CircPoly b = random_poly(p, rng);
            const CircPoly c = random_poly(p, rng);
            REQUIRE(a * b == b * a);
            REQUIRE((a * b) * c == a * (b * c));
        }
    }
}

TEST_CASE("transpose maps exponents to their negation") {
    REQUIRE(CircPoly::monomial(7, 0).transposed() == CircPoly::monomial(7, 0));
    REQUIRE(CircPoly::monomial(7, 2).transposed() == CircPoly::monomial(7, 5));
    REQUIRE(CircPoly(7, {0, 1, 3}).transposed() == CircPoly(7, {0, 6, 4}));
}

TEST_CASE("transpose is an involution") {
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        const CircPoly a = random_poly(29, rng);
        REQUIRE(a.transposed().transposed() == a);
    }
}

TEST_CASE("transpose matches the dense transpose") {
    Rng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        QcMatrix m(11, 1, 1);
        m.at(0, 0) = random_poly(11, rng);
        QcMatrix mt(11, 1, 1);
        mt.at(0, 0) = m.at(0, 0).transposed();
        const BitMatrix dense = testutil::dense_from_blocks(m);
        const BitMatrix dense_t = testutil::dense_from_blocks(mt);
        for (std::size_t r = 0; r < dense.rows(); ++r)
            for (std::size_t c = 0; c < dense.cols(); ++c) REQUIRE(dense.get(r, c) == dense_t.get(c, r));
    }
}

TEST_CASE("syndrome of the zero vector is zero") {
    QcMatrix h(5, 1, 2);
    h.at(0, 0) = CircPoly::monomial(5, 1);
    h.at(0, 1) = CircPoly::monomial(5, 2);
    REQUIRE_FALSE(qc_syndrome(h, BitVector(10)).any());
}

TEST_CASE("syndrome through a single identity block returns the vector") {
    QcMatrix h(7, 1, 1);
    h.at(0, 0) = CircPoly::one(7);
    Rng rng(5);
    const BitVector v = BitVector::random(7, rng);
    REQUIRE(qc_syndrome(h, v) == v);
}

TEST_CASE("syndrome hand example p=5") {
    // H = [x^1, x^2], v = [x^0 | 0] -> s = x^4
    QcMatrix h(5, 1, 2);
    h.at(0, 0) = CircPoly::monomial(5, 1);
    h.at(0, 1) = CircPoly::monomial(5, 2);
    BitVector v(10);
    v.set(0);
    BitVector expected(5);
    expected.set(4);
    REQUIRE(qc_syndrome(h, v) == expected);
    REQUIRE(testutil::dense_syndrome(h, v) == expected);
}

TEST_CASE("syndrome agrees with the dense oracle") {
    Rng rng(17);
    for (std::uint32_t p : {5u, 13u, 31u}) {
        QcMatrix h(p, 2, 3);
        for (std::uint32_t i = 0; i < 2; ++i)
            for (std::uint32_t j = 0; j < 3; ++j) h.at(i, j) = random_poly(p, rng);
        for (int rep = 0; rep < 25; ++rep) {
            const BitVector v = BitVector::random(3 * p, rng);
            REQUIRE(qc_syndrome(h, v) == testutil::dense_syndrome(h, v));
        }
    }
}

TEST_CASE("row vector times matrix agrees with the dense oracle") {
    Rng rng(19);
    for (std::uint32_t p : {5u, 13u}) {
        QcMatrix a(p, 2, 4);
        for (std::uint32_t i = 0; i < 2; ++i)
            for (std::uint32_t j = 0; j < 4; ++j) a.at(i, j) = random_poly(p, rng);
        for (int rep = 0; rep < 25; ++rep) {
            const BitVector v = BitVector::random(2 * p, rng);
            REQUIRE(qc_vec_mul(v, a) == testutil::dense_vec_mul(v, a));
        }
    }
}

TEST_CASE("single parity equation null space") {
    // H = [x^a | x^b] -> G = [1 | x^{(b-a) mod p}], the unique circulant
    // satisfying H*G^T = 0.
    const std::uint32_t p = 5;
    for (std::uint32_t a = 0; a < p; ++a)
        for (std::uint32_t b = 0; b < p; ++b) {
            QcMatrix h(p, 1, 2);
            h.at(0, 0) = CircPoly::monomial(p, a);
            h.at(0, 1) = CircPoly::monomial(p, b);
            auto g = qc_nullspace_systematic(h);
            REQUIRE(g.has_value());
            REQUIRE(g->at(0, 0) == CircPoly::one(p));
            REQUIRE(g->at(0, 1) == CircPoly::monomial(p, (b + p - a) % p));
        }
}

TEST_CASE("null space satisfies the defining property bit-exactly") {
    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const std::uint32_t p = 5;
        QcMatrix h(p, 2, 3);
        for (std::uint32_t i = 0; i < 2; ++i)
            for (std::uint32_t j = 0; j < 3; ++j)
                h.at(i, j) = CircPoly::monomial(p, static_cast<std::uint32_t>(rng.below(p)));
        auto g = qc_nullspace_systematic(h);
        if (!g) continue;  // regeneration path
        // dense check of H * G^T = 0
        const BitMatrix hd = testutil::dense_from_blocks(h);
        const BitMatrix gd = testutil::dense_from_blocks(*g);
        for (std::size_t r = 0; r < gd.rows(); ++r) {
            BitVector row(gd.cols());
            for (std::size_t c = 0; c < gd.cols(); ++c) row.set(c, gd.get(r, c));
            REQUIRE_FALSE(hd.mul_vec(row).any());
        }
    }
}

TEST_CASE("null space generator has full rank k0*p") {
    Rng rng(29);
    int solved = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const std::uint32_t p = 5;
        QcMatrix h(p, 2, 3);
        for (std::uint32_t i = 0; i < 2; ++i)
            for (std::uint32_t j = 0; j < 3; ++j)
                h.at(i, j) = CircPoly::monomial(p, static_cast<std::uint32_t>(rng.below(p)));
        auto g = qc_nullspace_systematic(h);
        if (!g) continue;
        ++solved;
        REQUIRE(testutil::dense_from_blocks(*g).rank() == 1 * p);
        // every non-identity block is a genuine circulant polynomial
        REQUIRE(g->block_rows() == 1);
        REQUIRE(g->block_cols() == 3);
    }
    REQUIRE(solved > 0);
}

TEST_CASE("codewords of the generator have zero syndrome") {
    Rng rng(31);
    for (std::uint32_t p : {5u, 13u, 31u}) {
        QcMatrix h(p, 2, 3);
        bool built = false;
        for (int attempt = 0; attempt < 50 && !built; ++attempt) {
            for (std::uint32_t i = 0; i < 2; ++i)
                for (std::uint32_t j = 0; j < 3; ++j)
                    h.at(i, j) = CircPoly::monomial(p, static_cast<std::uint32_t>(rng.below(p)));
            built = qc_nullspace_systematic(h).has_value();
        }
        REQUIRE(built);
        const QcMatrix g = *qc_nullspace_systematic(h);
        for (int rep = 0; rep < 1000; ++rep) {
            const BitVector u = BitVector::random(p, rng);
            const BitVector c = qc_vec_mul(u, g);
            REQUIRE_FALSE(qc_syndrome(h, c).any());
        }
    }
}

TEST_CASE("mismatched lengths are rejected") {
    QcMatrix h(5, 1, 2);
    h.at(0, 0) = CircPoly::one(5);
    h.at(0, 1) = CircPoly::one(5);
    REQUIRE_THROWS_AS(qc_syndrome(h, BitVector(7)), std::invalid_argument);
    REQUIRE_THROWS_AS(qc_vec_mul(BitVector(3), h), std::invalid_argument);
}

TEST_CASE("bit vector hex round trip") {
    Rng rng(37);
    for (std::size_t n : {1u, 7u, 8u, 64u, 65u, 103u}) {
        const BitVector v = BitVector::random(n, rng);
        REQUIRE(BitVector::from_hex(v.to_hex(), n) == v);
    }
    REQUIRE_THROWS(BitVector::from_hex("zz", 8));
}
