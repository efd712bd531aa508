// Chunked index-space parallelism. Work is split into fixed chunks handed to
// a small worker pool; per-chunk states are returned in chunk order so every
// reduction is schedule-independent. MONOMIAL_MCELIECE_THREADS caps the pool.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace mmce {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("MONOMIAL_MCELIECE_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v >= 1 && v < 1024) n = static_cast<unsigned>(v);
    }
    return n;
}

// body(state, lo, hi) fills one chunk's state for indices [lo, hi).
template <typename State, typename Body>
std::vector<State> parallel_chunked(std::uint64_t total, std::uint64_t chunk_size, Body&& body) {
    if (chunk_size == 0) chunk_size = 1;
    const std::uint64_t nchunks = total == 0 ? 0 : (total + chunk_size - 1) / chunk_size;
    std::vector<State> states(nchunks);
    auto run_chunk = [&](std::uint64_t c) {
        const std::uint64_t lo = c * chunk_size;
        const std::uint64_t hi = std::min(total, lo + chunk_size);
        body(states[c], lo, hi);
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<std::uint64_t>(worker_count(), nchunks == 0 ? 1 : nchunks));
    if (workers <= 1) {
        for (std::uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
        return states;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= nchunks || failed.load()) return;
            try {
                run_chunk(c);
            } catch (...) {
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(first_error);
    return states;
}

}  // namespace mmce
