#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "mmce/recovery.hpp"
#include "mmce/scheme.hpp"

using namespace mmce;

namespace {

DistanceSpectrum full_spectrum(std::uint32_t p, std::uint32_t n0) {
    DistanceSpectrum s;
    s.p = p;
    s.n0 = n0;
    s.sets.resize(DistanceSpectrum::pair_count(n0));
    for (auto& set : s.sets)
        for (std::uint16_t d = 0; d <= p / 2; ++d) set.push_back(d);
    return s;
}

}  // namespace

TEST_CASE("graph of a complete spectrum") {
    const SpectrumGraph g = build_graph(full_spectrum(5, 5));
    REQUIRE(g.node_count() == 21);  // apex + 4 columns x 5 residues
    for (std::uint32_t j = 1; j < 5; ++j) REQUIRE(g.column_nodes[j - 1].size() == 5);
    // cross-column adjacency is complete
    for (std::uint32_t j1 = 1; j1 < 4; ++j1)
        for (std::uint32_t j2 = j1 + 1; j2 < 5; ++j2)
            for (std::uint16_t r1 : g.column_nodes[j1 - 1])
                for (std::uint16_t r2 : g.column_nodes[j2 - 1]) REQUIRE(g.adjacent(j1, r1, j2, r2));
}

TEST_CASE("singleton zero distance collapses to one node") {
    DistanceSpectrum s;
    s.p = 7;
    s.n0 = 2;
    s.sets = {{0}};
    const SpectrumGraph g = build_graph(s);
    REQUIRE(g.node_count() == 2);
    REQUIRE(g.column_nodes[0] == std::vector<std::uint16_t>{0});
    const CliqueList cliques = enumerate_cliques(g, 10);
    REQUIRE(cliques.cliques.size() == 1);
    REQUIRE_FALSE(cliques.truncated);
}

TEST_CASE("malformed spectra are rejected") {
    DistanceSpectrum s;
    s.p = 7;
    s.n0 = 3;
    s.sets = {{0}, {1}};  // missing one pair
    REQUIRE_THROWS_AS(build_graph(s), std::invalid_argument);
    s.sets = {{0}, {1}, {5}};  // 5 > 3 = floor(7/2)
    REQUIRE_THROWS_AS(build_graph(s), std::invalid_argument);
}

TEST_CASE("complete spectrum at p=5 yields 5^4 cliques closed under mirroring") {
    const SpectrumGraph g = build_graph(full_spectrum(5, 5));
    const CliqueList list = enumerate_cliques(g, 10000);
    REQUIRE_FALSE(list.truncated);
    REQUIRE(list.cliques.size() == 625);
    std::set<Clique> all(list.cliques.begin(), list.cliques.end());
    for (const Clique& c : list.cliques) {
        REQUIRE(c[0] == 0);
        REQUIRE(all.count(mirror_clique(c, 5)) == 1);
    }
}

TEST_CASE("a singleton nonzero distance yields a mirror pair of cliques") {
    DistanceSpectrum s;
    s.p = 7;
    s.n0 = 2;
    s.sets = {{2}};
    const SpectrumGraph g = build_graph(s);
    const CliqueList list = enumerate_cliques(g, 10);
    REQUIRE(list.cliques.size() == 2);
    REQUIRE(list.cliques[0] == Clique{0, 2});
    REQUIRE(list.cliques[1] == Clique{0, 5});
    REQUIRE(mirror_clique(list.cliques[0], 7) == list.cliques[1]);
}

TEST_CASE("complete spectrum at p=7 has the expected clique count") {
    const SpectrumGraph g = build_graph(full_spectrum(7, 7));
    const CliqueList list = enumerate_cliques(g, 200000);
    REQUIRE_FALSE(list.truncated);
    REQUIRE(list.cliques.size() == 117649);  // 7^6
}

TEST_CASE("truncation stops exactly at the limit") {
    const SpectrumGraph g = build_graph(full_spectrum(5, 5));
    const CliqueList list = enumerate_cliques(g, 100);
    REQUIRE(list.truncated);
    REQUIRE(list.cliques.size() == 100);
}

TEST_CASE("mirror worked example") {
    const Clique c = {0, 2, 3};
    REQUIRE(mirror_clique(c, 5) == Clique{0, 3, 2});
    const Clique zeros = {0, 0, 0};
    REQUIRE(mirror_clique(zeros, 5) == zeros);
}

TEST_CASE("every standard-form row appears among the cliques") {
    Rng rng(5);
    for (int rep = 0; rep < 60; ++rep) {
        const std::uint32_t p = rep % 2 ? 11 : 13;
        const std::uint32_t r0 = 2 + static_cast<std::uint32_t>(rng.below(2));
        const std::uint32_t n0 = r0 + 1 + static_cast<std::uint32_t>(rng.below(2));
        const ExponentMatrix w = random_monomial_matrix(p, r0, n0, rng);
        const ExponentMatrix sf = standard_form(w);
        const DistanceSpectrum s = distance_spectrum(w);
        const SpectrumGraph g = build_graph(s);
        const CliqueList list = enumerate_cliques(g, 200000);
        REQUIRE_FALSE(list.truncated);
        REQUIRE(list.cliques.size() >= 2 * static_cast<std::size_t>(w.r0));
        std::set<Clique> all(list.cliques.begin(), list.cliques.end());
        for (std::uint32_t i = 0; i < sf.r0; ++i) {
            Clique row(sf.n0);
            for (std::uint32_t j = 0; j < sf.n0; ++j) row[j] = sf.at(i, j);
            REQUIRE(all.count(row) == 1);
        }
        // closure under mirroring
        for (const Clique& c : list.cliques) REQUIRE(all.count(mirror_clique(c, p)) == 1);
    }
}

TEST_CASE("clique enumeration is deterministic and sorted") {
    Rng rng(6);
    const ExponentMatrix w = random_monomial_matrix(11, 3, 4, rng);
    const SpectrumGraph g = build_graph(distance_spectrum(w));
    const CliqueList a = enumerate_cliques(g, 100000);
    const CliqueList b = enumerate_cliques(g, 100000);
    REQUIRE(a.cliques == b.cliques);
    REQUIRE(std::is_sorted(a.cliques.begin(), a.cliques.end()));
}

TEST_CASE("assembling the true rows reproduces the standard form") {
    Rng rng(7);
    const ExponentMatrix w = random_monomial_matrix(11, 3, 4, rng);
    const ExponentMatrix sf = standard_form(w);
    const DistanceSpectrum s = distance_spectrum(w);
    std::vector<Clique> rows;
    for (std::uint32_t i = 0; i < sf.r0; ++i) {
        Clique row(sf.n0);
        for (std::uint32_t j = 0; j < sf.n0; ++j) row[j] = sf.at(i, j);
        rows.push_back(row);
    }
    const auto candidates = assemble_candidates(rows, s, sf.r0);
    REQUIRE(candidates.size() == 1);
    REQUIRE(row_equivalent(candidates[0], sf));
}

TEST_CASE("assembly from the enumerated cliques recovers a decoding-equivalent key") {
    Rng rng(8);
    KeyPair kp = keygen(SchemeParams::generic(13, 2, 3, 2), rng);
    const DistanceSpectrum s = distance_spectrum(kp.sk.W);
    const SpectrumGraph g = build_graph(s);
    const CliqueList list = enumerate_cliques(g, 100000);
    REQUIRE_FALSE(list.truncated);
    AssembleOptions opts;
    opts.max_candidates = 64;
    const auto candidates = assemble_candidates(list.cliques, s, kp.sk.W.r0, opts);
    REQUIRE_FALSE(candidates.empty());
    // the true standard form must be among the assembled candidates
    const ExponentMatrix sf = standard_form(kp.sk.W);
    bool found = false;
    for (const auto& cand : candidates)
        if (row_equivalent(cand, sf)) found = true;
    REQUIRE(found);
}

TEST_CASE("candidate validation accepts the true key and row permutations of it") {
    Rng rng(9);
    KeyPair kp = keygen(SchemeParams::full_spectrum(13, 2), rng);
    const auto probes = make_probes(kp.pk, 20, 3, 77);
    const ExponentMatrix sf = standard_form(kp.sk.W);
    REQUIRE(validate_candidate(sf, probes));
    SECTION("row order does not matter") {
        ExponentMatrix permuted = sf;
        for (std::uint32_t j = 0; j < sf.n0; ++j) {
            std::swap(permuted.at(0, j), permuted.at(5, j));
            std::swap(permuted.at(2, j), permuted.at(3, j));
        }
        REQUIRE(validate_candidate(permuted, probes));
    }
    SECTION("a fresh construction with different randomness is rejected") {
        Rng other(10);
        const auto [w2, sec2] = build_exponent_matrix(13, other);
        REQUIRE(w2 != kp.sk.W);
        REQUIRE_FALSE(validate_candidate(standard_form(w2), probes));
    }
}

TEST_CASE("graph export lists every node and edge once") {
    DistanceSpectrum s;
    s.p = 7;
    s.n0 = 3;
    s.sets = {{1}, {2}, {3}};
    const SpectrumGraph g = build_graph(s);
    std::stringstream ss;
    export_edge_list(ss, g);
    std::size_t edge_lines = 0;
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++edge_lines;
    REQUIRE(edge_lines == g.edge_count());
}

TEST_CASE("clique export emits one row per clique") {
    const SpectrumGraph g = build_graph(full_spectrum(5, 3));
    const CliqueList list = enumerate_cliques(g, 1000);
    std::stringstream ss;
    export_cliques(ss, list);
    std::size_t lines = 0;
    std::string line;
    while (std::getline(ss, line)) ++lines;
    REQUIRE(lines == list.cliques.size());
}
