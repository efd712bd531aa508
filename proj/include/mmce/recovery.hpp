// Key recovery from a known distance spectrum: build the compatibility graph
// whose n0-cliques through the apex node are candidate standard-form rows,
// enumerate them by column-ordered backtracking, assemble row sets into
// candidate exponent matrices and test candidates against probe decryptions.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/bitvec.hpp"
#include "mmce/exponent_matrix.hpp"
#include "mmce/rng.hpp"
#include "mmce/scheme.hpp"

namespace mmce {

// Apex node 0 stands for column 0 (all-zero in standard form). Column j >= 1
// holds one node per admissible within-block residue: both d and p - d for
// every d in the (0, j) spectrum set. Cross-column adjacency follows the
// pairwise spectrum sets.
struct SpectrumGraph {
    std::uint32_t p = 0, n0 = 0;
    std::vector<std::vector<std::uint16_t>> column_nodes;  // index j-1 -> sorted residues of column j
    DistanceSpectrum spectrum;                             // kept for adjacency queries

    bool adjacent(std::uint32_t j1, std::uint16_t r1, std::uint32_t j2, std::uint16_t r2) const {
        if (j1 == j2) return false;
        const std::uint32_t i = std::min(j1, j2), j = std::max(j1, j2);
        const std::uint16_t ri = j1 < j2 ? r1 : r2, rj = j1 < j2 ? r2 : r1;
        return spectrum.contains(i, j, distance(ri, rj, p));
    }

    std::size_t node_count() const {
        std::size_t n = 1;
        for (const auto& col : column_nodes) n += col.size();
        return n;
    }

    std::size_t edge_count() const {
        std::size_t n = node_count() - 1;  // apex to every column node
        for (std::uint32_t j1 = 1; j1 + 1 < n0; ++j1)
            for (std::uint32_t j2 = j1 + 1; j2 < n0; ++j2)
                for (std::uint16_t r1 : column_nodes[j1 - 1])
                    for (std::uint16_t r2 : column_nodes[j2 - 1])
                        if (adjacent(j1, r1, j2, r2)) ++n;
        return n;
    }

    // Export label: 0 for the apex; 1 + (j-1)*p + residue for column nodes
    // (offset by one so the first residue of column 1 cannot collide with
    // the apex label).
    std::size_t label(std::uint32_t j, std::uint16_t residue) const {
        return 1 + static_cast<std::size_t>(j - 1) * p + residue;
    }
};

inline SpectrumGraph build_graph(const DistanceSpectrum& s) {
    if (s.n0 < 2) throw std::invalid_argument("build_graph: need at least two block columns");
    if (s.sets.size() != DistanceSpectrum::pair_count(s.n0))
        throw std::invalid_argument("build_graph: spectrum does not cover all column pairs");
    for (const auto& set : s.sets)
        for (std::uint16_t d : set)
            if (d > s.p / 2) throw std::invalid_argument("build_graph: distance beyond p/2");
    SpectrumGraph g;
    g.p = s.p;
    g.n0 = s.n0;
    g.spectrum = s;
    g.column_nodes.resize(s.n0 - 1);
    for (std::uint32_t j = 1; j < s.n0; ++j) {
        std::vector<std::uint16_t> residues;
        for (std::uint16_t d : s.at(0, j)) {
            residues.push_back(d);
            const std::uint16_t neg = d == 0 ? 0 : static_cast<std::uint16_t>(s.p - d);
            if (neg != d) residues.push_back(neg);
        }
        std::sort(residues.begin(), residues.end());
        residues.erase(std::unique(residues.begin(), residues.end()), residues.end());
        g.column_nodes[j - 1] = std::move(residues);
    }
    return g;
}

// One clique = one candidate standard-form row: residue per column, entry 0
// for column 0.
using Clique = std::vector<std::uint16_t>;

struct CliqueList {
    std::vector<Clique> cliques;
    bool truncated = false;
};

// Column-ordered backtracking; exhaustive (and sorted) whenever the total
// count fits the limit, otherwise exactly `limit` cliques with the truncation
// flag raised.
inline CliqueList enumerate_cliques(const SpectrumGraph& g, std::uint64_t limit) {
    if (limit < 1) throw std::invalid_argument("enumerate_cliques: limit must be positive");
    CliqueList out;
    Clique current(g.n0, 0);
    bool stop = false;
    std::function<void(std::uint32_t)> descend = [&](std::uint32_t column) {
        if (column == g.n0) {
            if (out.cliques.size() == limit) {
                out.truncated = true;
                stop = true;
                return;
            }
            out.cliques.push_back(current);
            return;
        }
        for (std::uint16_t r : g.column_nodes[column - 1]) {
            bool ok = true;
            for (std::uint32_t jj = 1; jj < column && ok; ++jj) ok = g.adjacent(jj, current[jj], column, r);
            if (!ok) continue;
            current[column] = r;
            descend(column + 1);
            if (stop) return;
        }
    };
    descend(1);
    return out;
}

// Negate every residue mod p; always lands on another clique of the graph.
inline Clique mirror_clique(const Clique& c, std::uint32_t p) {
    Clique out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] == 0 ? 0 : static_cast<std::uint16_t>(p - c[i]);
    return out;
}

struct AssembleOptions {
    std::size_t max_candidates = 16;
    std::uint64_t max_steps = 1'000'000;
    bool allow_subset = true;  // emit spectrum-subset candidates when no exact cover exists
};

// Chooses r0 cliques (by increasing index) as rows of a standard-form
// candidate. Any clique set already satisfies spectrum(candidate) within S;
// exact covers (spectrum equality) are preferred and listed first.
inline std::vector<ExponentMatrix> assemble_candidates(const std::vector<Clique>& cliques,
                                                       const DistanceSpectrum& s, std::uint32_t r0,
                                                       const AssembleOptions& opts = {}) {
    std::vector<ExponentMatrix> exact, subset;
    if (cliques.empty() || r0 == 0) return exact;
    const std::uint32_t n0 = s.n0;
    std::vector<std::size_t> chosen;
    std::uint64_t steps = 0;

    auto emit = [&](const std::vector<std::size_t>& rows) {
        ExponentMatrix w(s.p, r0, n0);
        for (std::uint32_t i = 0; i < r0; ++i)
            for (std::uint32_t j = 0; j < n0; ++j) w.at(i, j) = cliques[rows[i]][j];
        if (distance_spectrum(w) == s)
            exact.push_back(std::move(w));
        else if (opts.allow_subset)
            subset.push_back(std::move(w));
    };

    auto done = [&] {
        return exact.size() >= opts.max_candidates ||
               exact.size() + subset.size() >= 4 * opts.max_candidates || steps >= opts.max_steps;
    };

    std::function<void(std::size_t)> dfs = [&](std::size_t start) {
        if (done()) return;
        ++steps;
        if (chosen.size() == r0) {
            emit(chosen);
            return;
        }
        const std::size_t need = r0 - chosen.size();
        for (std::size_t idx = start; idx + need <= cliques.size() && !done(); ++idx) {
            chosen.push_back(idx);
            dfs(idx + 1);
            chosen.pop_back();
        }
    };
    dfs(0);

    std::vector<ExponentMatrix> out = std::move(exact);
    for (auto& w : subset) {
        if (out.size() >= opts.max_candidates) break;
        out.push_back(std::move(w));
    }
    if (out.size() > opts.max_candidates) out.resize(opts.max_candidates);
    return out;
}

// Known-error probe set generated with the true public key.
struct Probe {
    BitVector x;
    BitVector e;
};

inline std::vector<Probe> make_probes(const PublicKey& pk_in, std::size_t count, std::uint32_t probe_weight,
                                      std::uint64_t seed) {
    PublicKey pk = pk_in;
    pk.ensure_dense();
    std::vector<Probe> probes;
    probes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::stream(seed, i);
        const BitVector u = BitVector::random(pk.k_bits(), rng);
        const BitVector e = BitVector::random_weight(pk.n_bits(), probe_weight, rng);
        probes.push_back({encrypt(pk, u, e, probe_weight), e});
    }
    return probes;
}

// A candidate is accepted iff decoding under its parity-check matrix
// recovers the planted error on every probe.
inline bool validate_candidate(const ExponentMatrix& w_hat, const std::vector<Probe>& probes,
                               const DecoderConfig& cfg = {}) {
    const QcMatrix h = expand_parity_check(w_hat);
    for (const Probe& probe : probes) {
        const DecodeResult res = bit_flip_decode(h, probe.x, cfg);
        if (!res.success) return false;
        if ((res.corrected ^ probe.x) != probe.e) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// exports

inline void export_edge_list(std::ostream& os, const SpectrumGraph& g) {
    os << "# spectrum graph p=" << g.p << " n0=" << g.n0 << " nodes=" << g.node_count() << '\n';
    os << "# node 0 is the apex; column j residue r has label 1 + (j-1)*p + r\n";
    for (std::uint32_t j = 1; j < g.n0; ++j)
        for (std::uint16_t r : g.column_nodes[j - 1]) os << 0 << ' ' << g.label(j, r) << '\n';
    for (std::uint32_t j1 = 1; j1 + 1 < g.n0; ++j1)
        for (std::uint32_t j2 = j1 + 1; j2 < g.n0; ++j2)
            for (std::uint16_t r1 : g.column_nodes[j1 - 1])
                for (std::uint16_t r2 : g.column_nodes[j2 - 1])
                    if (g.adjacent(j1, r1, j2, r2)) os << g.label(j1, r1) << ' ' << g.label(j2, r2) << '\n';
}

inline void export_cliques(std::ostream& os, const CliqueList& list) {
    for (const Clique& c : list.cliques) {
        for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
        os << '\n';
    }
}

}  // namespace mmce
