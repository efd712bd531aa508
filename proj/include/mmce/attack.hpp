// Reaction attack: chosen-error queries against a decryption-failure oracle,
// per-(block pair, distance) failure/total counters, spectrum classification
// and the permutation test used to quantify whether the counters separate at
// all.
//
// The oracle is any callable taking a ciphertext and returning true when the
// receiver signals a failure; nothing else about the receiver is assumed.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/bitvec.hpp"
#include "mmce/exponent_matrix.hpp"
#include "mmce/parallel.hpp"
#include "mmce/rng.hpp"
#include "mmce/scheme.hpp"

namespace mmce {

struct AttackCounters {
    std::uint32_t p = 0, n0 = 0;
    std::vector<std::uint64_t> a;  // failures, indexed cell_index(i, j, d)
    std::vector<std::uint64_t> b;  // totals

    AttackCounters() = default;
    AttackCounters(std::uint32_t p_, std::uint32_t n0_)
        : p(p_), n0(n0_), a(DistanceSpectrum::pair_count(n0_) * num_distances(p_), 0),
          b(DistanceSpectrum::pair_count(n0_) * num_distances(p_), 0) {}

    static std::size_t num_distances(std::uint32_t p) { return static_cast<std::size_t>(p / 2) + 1; }
    std::size_t num_cells() const { return b.size(); }

    std::size_t cell_index(std::uint32_t i, std::uint32_t j, std::uint32_t d) const {
        return DistanceSpectrum::pair_index(i, j, n0) * num_distances(p) + d;
    }

    void merge(const AttackCounters& o) {
        if (o.p != p || o.n0 != n0) throw std::invalid_argument("AttackCounters::merge: shape mismatch");
        for (std::size_t c = 0; c < b.size(); ++c) {
            a[c] += o.a[c];
            b[c] += o.b[c];
        }
    }
};

inline void write_counters_csv(std::ostream& os, const AttackCounters& c) {
    os << "i,j,d,a,b\n";
    const std::size_t nd = AttackCounters::num_distances(c.p);
    for (std::uint32_t i = 0; i < c.n0; ++i)
        for (std::uint32_t j = i + 1; j < c.n0; ++j)
            for (std::uint32_t d = 0; d < nd; ++d) {
                const std::size_t cell = c.cell_index(i, j, d);
                os << i << ',' << j << ',' << d << ',' << c.a[cell] << ',' << c.b[cell] << '\n';
            }
}

inline AttackCounters read_counters_csv(std::istream& is, std::uint32_t p, std::uint32_t n0) {
    AttackCounters c(p, n0);
    std::string line;
    if (!std::getline(is, line) || line != "i,j,d,a,b") throw std::runtime_error("counters csv: bad header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::uint32_t i, j, d;
        std::uint64_t av, bv;
        if (!(ls >> i >> j >> d >> av >> bv)) throw std::runtime_error("counters csv: bad row");
        const std::size_t cell = c.cell_index(i, j, d);
        c.a[cell] = av;
        c.b[cell] = bv;
    }
    return c;
}

// Per-query record of touched cells, for permutation tests.
struct AttackTrace {
    std::vector<std::uint32_t> cells;    // concatenated cell indices
    std::vector<std::uint64_t> offsets;  // offsets.size() == queries + 1
    std::vector<std::uint8_t> failed;    // one flag per query
};

using FailureOracle = std::function<bool(const BitVector& ciphertext)>;

struct AttackOptions {
    bool record_trace = false;
    std::uint64_t progress_every = 0;  // 0 = silent; progress goes to stderr
    std::ostream* progress_stream = nullptr;
};

struct AttackResult {
    AttackCounters counters;
    std::uint64_t queries = 0;  // queries actually counted
    std::uint64_t failures = 0;
    bool aborted = false;  // oracle raised; counters cover the completed queries
    AttackTrace trace;     // populated iff requested
};

// Cross-block support pairs of e, as counter cells. Distances are between
// within-block offsets, which equals the cyclic distance of the global
// positions mod p.
inline void query_cells(const BitVector& e, const AttackCounters& shape, std::vector<std::uint32_t>& out) {
    out.clear();
    const std::uint32_t p = shape.p;
    const std::vector<std::uint32_t> psi = e.support();
    for (std::size_t x = 0; x < psi.size(); ++x)
        for (std::size_t y = x + 1; y < psi.size(); ++y) {
            const std::uint32_t zi = psi[x] / p, zj = psi[y] / p;
            if (zi == zj) continue;
            const std::uint32_t d = distance(psi[x] % p, psi[y] % p, p);
            out.push_back(static_cast<std::uint32_t>(shape.cell_index(std::min(zi, zj), std::max(zi, zj), d)));
        }
}

// Steps: draw (u, e), encrypt, ask the oracle, then for every cross-block
// index pair of e bump the total counter and, on failure, the failure
// counter. Per-query RNG streams make the result independent of scheduling.
inline AttackResult run_attack(const FailureOracle& oracle, const PublicKey& pk_in, std::uint64_t queries,
                               std::uint64_t seed, const AttackOptions& opts = {}) {
    PublicKey pk = pk_in;
    pk.ensure_dense();
    const std::uint32_t p = pk.p;
    const std::uint32_t n0 = pk.k0 + pk.r0;
    struct ChunkState {
        AttackCounters counters;
        std::uint64_t failures = 0;
        std::uint64_t queries_done = 0;
        std::vector<std::uint32_t> cells;
        std::vector<std::uint64_t> sizes;
        std::vector<std::uint8_t> failed;
    };
    struct Progress {
        std::atomic<std::uint64_t> done{0};
        std::atomic<std::uint64_t> failures{0};
        std::atomic<bool> abort{false};
        std::mutex io;
        std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    } progress;
    const std::uint64_t chunk = 2048;
    auto states = parallel_chunked<ChunkState>(queries, chunk, [&](ChunkState& st, std::uint64_t lo,
                                                                    std::uint64_t hi) {
        st.counters = AttackCounters(p, n0);
        std::vector<std::uint32_t> cells;
        for (std::uint64_t idx = lo; idx < hi && !progress.abort.load(); ++idx) {
            Rng rng = Rng::stream(seed, idx);
            const BitVector u = BitVector::random(pk.k_bits(), rng);
            const BitVector e = BitVector::random_weight(pk.n_bits(), pk.t, rng);
            const BitVector x = encrypt(pk, u, e, pk.t);
            bool fail = false;
            try {
                fail = oracle(x);
            } catch (...) {
                // transport failure: stop everywhere, keep what we have
                progress.abort.store(true);
                break;
            }
            query_cells(e, st.counters, cells);
            for (std::uint32_t cell : cells) {
                st.counters.b[cell]++;
                if (fail) st.counters.a[cell]++;
            }
            if (fail) st.failures++;
            st.queries_done++;
            if (opts.record_trace) {
                st.cells.insert(st.cells.end(), cells.begin(), cells.end());
                st.sizes.push_back(cells.size());
                st.failed.push_back(fail ? 1 : 0);
            }
        }
        if (opts.progress_every && opts.progress_stream) {
            const std::uint64_t before = progress.done.fetch_add(st.queries_done);
            const std::uint64_t fails = progress.failures.fetch_add(st.failures) + st.failures;
            const std::uint64_t after = before + st.queries_done;
            if (after / opts.progress_every != before / opts.progress_every || after == queries) {
                const double elapsed =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - progress.start).count();
                std::lock_guard<std::mutex> lock(progress.io);
                (*opts.progress_stream) << after << ',' << fails << ',' << elapsed << '\n';
            }
        }
    });

    AttackResult res;
    res.counters = AttackCounters(p, n0);
    res.aborted = progress.abort.load();
    if (opts.record_trace) res.trace.offsets.push_back(0);
    for (const auto& st : states) {
        res.counters.merge(st.counters);
        res.failures += st.failures;
        res.queries += st.queries_done;
        if (opts.record_trace) {
            res.trace.cells.insert(res.trace.cells.end(), st.cells.begin(), st.cells.end());
            for (std::size_t q = 0; q < st.sizes.size(); ++q) {
                res.trace.offsets.push_back(res.trace.offsets.back() + st.sizes[q]);
                res.trace.failed.push_back(st.failed[q]);
            }
        }
    }
    return res;
}

// Eve's oracle from an honest key pair: a decoding failure and a CCA-style
// re-encryption mismatch are the same observable from outside. The key pair
// must outlive the oracle.
inline FailureOracle make_oracle(KeyPair& kp) {
    kp.pk.ensure_dense();
    const KeyPair* keys = &kp;
    return [keys](const BitVector& x) {
        const DecryptResult res = decrypt(keys->sk, x);
        if (res.status != DecryptStatus::Ok) return true;
        const BitVector reenc = encrypt(keys->pk, res.u, BitVector(keys->pk.n_bits()), 0);
        return (reenc ^ x).weight() != keys->pk.t;
    };
}

// ---------------------------------------------------------------------------
// classification

enum class Mark : std::uint8_t { Absent, Present, Undecided };

struct SpectrumEstimate {
    std::uint32_t p = 0, n0 = 0;
    std::vector<Mark> marks;     // per cell
    std::vector<double> ratios;  // a/b per cell; NaN when below min samples

    std::size_t cell_index(std::uint32_t i, std::uint32_t j, std::uint32_t d) const {
        return DistanceSpectrum::pair_index(i, j, n0) * (static_cast<std::size_t>(p / 2) + 1) + d;
    }
    Mark at(std::uint32_t i, std::uint32_t j, std::uint32_t d) const { return marks[cell_index(i, j, d)]; }

    bool all_present_or_undecided() const {
        for (Mark m : marks)
            if (m == Mark::Absent) return false;
        return true;
    }
};

struct ClassifyOptions {
    std::uint32_t expected_size = 0;  // 0 = unknown, use clustering
    std::uint64_t min_samples = 100;
    bool lower_ratio_means_present = true;  // in-spectrum distances cancel in the syndrome
    double cluster_gate_z = 4.0;            // unknown-size mode: required gap significance
};

// Known spectrum size: per pair, mark the expected_size lowest-ratio
// distances present; a tie group straddling the cutoff is dropped to absent.
// Unknown size: 1-D 2-means on the ratios with a significance gate; a
// degenerate split marks everything present.
inline SpectrumEstimate classify_spectrum(const AttackCounters& c, const ClassifyOptions& opts) {
    const std::size_t nd = AttackCounters::num_distances(c.p);
    SpectrumEstimate est;
    est.p = c.p;
    est.n0 = c.n0;
    est.marks.assign(c.num_cells(), Mark::Undecided);
    est.ratios.assign(c.num_cells(), std::numeric_limits<double>::quiet_NaN());

    for (std::uint32_t i = 0; i < c.n0; ++i)
        for (std::uint32_t j = i + 1; j < c.n0; ++j) {
            std::vector<std::pair<double, std::uint32_t>> valid;  // (ratio, d)
            for (std::uint32_t d = 0; d < nd; ++d) {
                const std::size_t cell = c.cell_index(i, j, d);
                if (c.b[cell] < opts.min_samples) continue;
                const double ratio = static_cast<double>(c.a[cell]) / static_cast<double>(c.b[cell]);
                est.ratios[cell] = ratio;
                valid.emplace_back(ratio, d);
            }
            if (valid.empty()) continue;
            std::sort(valid.begin(), valid.end());
            const bool flip = !opts.lower_ratio_means_present;
            if (flip) std::reverse(valid.begin(), valid.end());

            if (opts.expected_size > 0) {
                std::size_t take = std::min<std::size_t>(opts.expected_size, valid.size());
                // ties broken toward absent
                while (take > 0 && take < valid.size() && valid[take - 1].first == valid[take].first) {
                    const double tie = valid[take].first;
                    while (take > 0 && valid[take - 1].first == tie) --take;
                }
                for (std::size_t k = 0; k < valid.size(); ++k)
                    est.marks[c.cell_index(i, j, valid[k].second)] = k < take ? Mark::Present : Mark::Absent;
                continue;
            }

            // 2-means on sorted ratios: best single split point
            double best_score = -1.0;
            std::size_t best_cut = 0;
            double total = 0.0;
            for (const auto& v : valid) total += v.first;
            double lo_sum = 0.0;
            for (std::size_t cut = 1; cut < valid.size(); ++cut) {
                lo_sum += valid[cut - 1].first;
                const double mean_lo = lo_sum / static_cast<double>(cut);
                const double mean_hi = (total - lo_sum) / static_cast<double>(valid.size() - cut);
                const double between = static_cast<double>(cut) * static_cast<double>(valid.size() - cut) *
                                       (mean_hi - mean_lo) * (mean_hi - mean_lo);
                if (between > best_score) {
                    best_score = between;
                    best_cut = cut;
                }
            }
            bool degenerate = best_cut == 0 || best_cut == valid.size();
            if (!degenerate) {
                // gate: gap must clear binomial noise
                double lo_mean = 0.0, hi_mean = 0.0;
                for (std::size_t k = 0; k < best_cut; ++k) lo_mean += valid[k].first;
                lo_mean /= static_cast<double>(best_cut);
                for (std::size_t k = best_cut; k < valid.size(); ++k) hi_mean += valid[k].first;
                hi_mean /= static_cast<double>(valid.size() - best_cut);
                const double pooled = total / static_cast<double>(valid.size());
                double min_b = std::numeric_limits<double>::max();
                for (std::uint32_t d = 0; d < nd; ++d) {
                    const std::size_t cell = c.cell_index(i, j, d);
                    if (c.b[cell] >= opts.min_samples) min_b = std::min(min_b, static_cast<double>(c.b[cell]));
                }
                const double sigma = std::sqrt(std::max(pooled * (1.0 - pooled), 1e-12) / min_b);
                if (std::abs(hi_mean - lo_mean) < opts.cluster_gate_z * sigma) degenerate = true;
            }
            if (degenerate) {
                for (const auto& v : valid) est.marks[c.cell_index(i, j, v.second)] = Mark::Present;
            } else {
                for (std::size_t k = 0; k < valid.size(); ++k)
                    est.marks[c.cell_index(i, j, valid[k].second)] =
                        k < best_cut ? Mark::Present : Mark::Absent;
            }
        }
    return est;
}

struct AccuracyMetrics {
    std::uint64_t true_positive = 0, false_positive = 0, false_negative = 0, true_negative = 0;
    std::uint64_t undecided = 0;
    double precision = 0.0, recall = 0.0;
};

inline AccuracyMetrics spectrum_accuracy(const SpectrumEstimate& est, const DistanceSpectrum& truth) {
    if (est.p != truth.p || est.n0 != truth.n0)
        throw std::invalid_argument("spectrum_accuracy: shape mismatch");
    AccuracyMetrics m;
    const std::size_t nd = static_cast<std::size_t>(est.p / 2) + 1;
    for (std::uint32_t i = 0; i < est.n0; ++i)
        for (std::uint32_t j = i + 1; j < est.n0; ++j)
            for (std::uint32_t d = 0; d < nd; ++d) {
                const bool truly = truth.contains(i, j, d);
                switch (est.at(i, j, d)) {
                    case Mark::Present:
                        truly ? ++m.true_positive : ++m.false_positive;
                        break;
                    case Mark::Absent:
                        truly ? ++m.false_negative : ++m.true_negative;
                        break;
                    case Mark::Undecided:
                        ++m.undecided;
                        if (truly) ++m.false_negative;  // a missed in-spectrum distance
                        break;
                }
            }
    const std::uint64_t pred = m.true_positive + m.false_positive;
    const std::uint64_t actual = m.true_positive + m.false_negative;
    m.precision = pred ? static_cast<double>(m.true_positive) / static_cast<double>(pred) : 0.0;
    m.recall = actual ? static_cast<double>(m.true_positive) / static_cast<double>(actual) : 0.0;
    return m;
}

// ---------------------------------------------------------------------------
// separation statistic

// For a split size s, sort cells by failure ratio, pool the s lowest per pair
// against the rest and convert the pooled rate difference to an AUC
// (AUC between two Bernoulli populations is 1/2 + (rate_hi - rate_lo)/2).
// The scan maximizes over split sizes; the null distribution replays the
// same scan on failure labels permuted across queries, so the data snooping
// is identical on both sides.
//
// Distance-0 cells can be excluded: their pair multiplicity and cancellation
// behavior are structural constants of every monomial code, so they carry no
// key information, yet they would register as a "split" at high query counts.
struct SeparationOptions {
    std::uint32_t permutations = 200;
    std::uint64_t min_samples = 100;
    bool include_zero_distance = false;
    std::uint64_t seed = 1;
};

struct SeparationResult {
    double observed_max_auc = 0.5;
    std::uint32_t observed_best_size = 0;
    double null_q95 = 0.5;
    std::vector<double> null_max_auc;  // one per permutation
    bool exceeds_null = false;
};

namespace detail {

inline double max_split_auc(const AttackCounters& c, const std::vector<std::size_t>& eligible,
                            std::uint32_t* best_size) {
    // group eligible cells by pair, sort each pair's cells by ratio
    const std::size_t nd = AttackCounters::num_distances(c.p);
    std::vector<std::vector<std::size_t>> by_pair(DistanceSpectrum::pair_count(c.n0));
    for (std::size_t cell : eligible) by_pair[cell / nd].push_back(cell);
    std::size_t max_size = 0;
    for (auto& cells : by_pair) {
        std::sort(cells.begin(), cells.end(), [&](std::size_t x, std::size_t y) {
            // a[x]/b[x] < a[y]/b[y] by exact cross-multiplication
            const unsigned __int128 rx = static_cast<unsigned __int128>(c.a[x]) * c.b[y];
            const unsigned __int128 ry = static_cast<unsigned __int128>(c.a[y]) * c.b[x];
            if (rx != ry) return rx < ry;
            return x < y;
        });
        max_size = std::max(max_size, cells.size());
    }
    double best = 0.5;
    std::uint32_t best_s = 0;
    for (std::size_t s = 1; s < max_size; ++s) {
        std::uint64_t a_lo = 0, b_lo = 0, a_hi = 0, b_hi = 0;
        for (const auto& cells : by_pair)
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (k < s) {
                    a_lo += c.a[cells[k]];
                    b_lo += c.b[cells[k]];
                } else {
                    a_hi += c.a[cells[k]];
                    b_hi += c.b[cells[k]];
                }
            }
        if (b_lo == 0 || b_hi == 0) continue;
        const double rate_lo = static_cast<double>(a_lo) / static_cast<double>(b_lo);
        const double rate_hi = static_cast<double>(a_hi) / static_cast<double>(b_hi);
        const double auc = 0.5 + (rate_hi - rate_lo) / 2.0;
        if (auc > best) {
            best = auc;
            best_s = static_cast<std::uint32_t>(s);
        }
    }
    if (best_size) *best_size = best_s;
    return best;
}

}  // namespace detail

inline SeparationResult separation_test(const AttackCounters& counters, const AttackTrace& trace,
                                        const SeparationOptions& opts) {
    if (trace.offsets.size() != trace.failed.size() + 1)
        throw std::invalid_argument("separation_test: trace was not recorded");
    const std::size_t nd = AttackCounters::num_distances(counters.p);
    std::vector<std::size_t> eligible;
    for (std::size_t cell = 0; cell < counters.num_cells(); ++cell) {
        if (counters.b[cell] < opts.min_samples) continue;
        if (!opts.include_zero_distance && cell % nd == 0) continue;
        eligible.push_back(cell);
    }
    SeparationResult res;
    if (eligible.empty()) return res;
    res.observed_max_auc = detail::max_split_auc(counters, eligible, &res.observed_best_size);

    // permutation null: shuffle failure flags across queries, rebuild a[]
    const std::size_t queries = trace.failed.size();
    std::vector<std::uint8_t> labels(trace.failed);
    AttackCounters work = counters;
    Rng rng(opts.seed);
    res.null_max_auc.reserve(opts.permutations);
    for (std::uint32_t rep = 0; rep < opts.permutations; ++rep) {
        rng.shuffle(labels);
        std::fill(work.a.begin(), work.a.end(), 0);
        for (std::size_t q = 0; q < queries; ++q) {
            if (!labels[q]) continue;
            for (std::uint64_t k = trace.offsets[q]; k < trace.offsets[q + 1]; ++k) work.a[trace.cells[k]]++;
        }
        res.null_max_auc.push_back(detail::max_split_auc(work, eligible, nullptr));
    }
    std::vector<double> sorted = res.null_max_auc;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q95 = sorted.empty() ? 0 : (sorted.size() * 95) / 100;
    res.null_q95 = sorted.empty() ? 0.5 : sorted[std::min(q95, sorted.size() - 1)];
    res.exceeds_null = res.observed_max_auc > res.null_q95;
    return res;
}

}  // namespace mmce
