// Parameter design: asymptotic information-set-decoding cost, the work
// factors of key-recovery and decoding attacks with the quasi-cyclic
// speed-ups, key sizes and the candidate-space size, assembled into design
// points for a target security level.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmce/exponent_matrix.hpp"

namespace mmce {

// log2 of C_ISD(n, k, w) ~ 2^{-c w} with c = log2(1 - k/n).
inline double isd_log2_cost(double n, double k, double w) {
    if (!(k > 0.0) || !(k < n)) throw std::invalid_argument("isd_log2_cost: need 0 < k < n");
    if (w < 0.0 || w > n) throw std::invalid_argument("isd_log2_cost: need 0 <= w <= n");
    return -w * std::log2(1.0 - k / n);
}

inline std::uint64_t key_size_bits(std::uint32_t p, std::uint32_t r0, std::uint32_t n0) {
    if (n0 <= r0) throw std::invalid_argument("key_size_bits: need n0 > r0");
    return static_cast<std::uint64_t>(r0) * (n0 - r0) * p;
}

struct DesignPoint {
    std::uint32_t security_level = 0;
    std::uint32_t p = 0, n0 = 0, r0 = 0, t = 0;
    double log2_candidates = 0.0;  // log2((p-1)!)
    std::uint64_t key_bits = 0;
    double log2_wf_key_recovery = 0.0;
    double log2_wf_decoding = 0.0;
    bool meets_security_level = false;
    bool degenerate = false;  // t == 0; decoding work factor is meaningless

    double key_kilobytes() const { return static_cast<double>(key_bits) / 8000.0; }
    std::uint32_t k0() const { return n0 - r0; }
    double code_length() const { return static_cast<double>(n0) * p; }
    // one block row of redundancy is linearly dependent up to r0 - 1 rows;
    // dimension k = k0 p + r0 - 1 holds with equality for non-trivial keys
    double code_dimension() const { return static_cast<double>(k0()) * p + r0 - 1; }
};

// Key recovery looks for the r0 weight-n0 dual codewords: (r0/p) * C_ISD(n, n-k, n0).
inline double wf_key_recovery(const DesignPoint& pt) {
    const double n = pt.code_length();
    const double k = pt.code_dimension();
    return std::log2(static_cast<double>(pt.r0) / pt.p) + isd_log2_cost(n, n - k, pt.n0);
}

// Decoding attack on the intentional error: C_ISD(n, k, t) / sqrt(p).
inline double wf_decoding(const DesignPoint& pt) {
    const double n = pt.code_length();
    const double k = pt.code_dimension();
    const double cost = pt.t == 0 ? 0.0 : isd_log2_cost(n, k, pt.t);
    return cost - 0.5 * std::log2(static_cast<double>(pt.p));
}

inline DesignPoint design_point(std::uint32_t security_level, std::uint32_t p, std::uint32_t t) {
    if (!is_prime(p)) throw std::invalid_argument("design_point: p must be prime");
    DesignPoint pt;
    pt.security_level = security_level;
    pt.p = p;
    pt.n0 = p;
    pt.r0 = (p + 1) / 2;
    pt.t = t;
    pt.degenerate = t == 0;
    pt.log2_candidates = count_candidates_log2(p);
    pt.key_bits = key_size_bits(p, pt.r0, pt.n0);
    pt.log2_wf_key_recovery = wf_key_recovery(pt);
    pt.log2_wf_decoding = wf_decoding(pt);
    pt.meets_security_level = !pt.degenerate &&
                              std::min(pt.log2_wf_key_recovery, pt.log2_wf_decoding) >=
                                  static_cast<double>(security_level);
    return pt;
}

struct Preset {
    const char* name;
    std::uint32_t security_level, p, t;
};

inline const std::vector<Preset>& design_presets() {
    static const std::vector<Preset> presets = {
        {"sl80", 80, 103, 84},
        {"sl128", 128, 137, 132},
        {"sl256", 256, 257, 261},
    };
    return presets;
}

inline void render_design_table(std::ostream& os, const std::vector<DesignPoint>& points) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%4s %5s %5s %5s %5s %10s %10s %8s %8s %6s", "SL", "p", "n0", "r0", "t",
                  "log2(N_W)", "K_s(kB)", "WF_KR", "WF_DA", "meets");
    os << buf << '\n';
    for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%4u %5u %5u %5u %5u %10.1f %10.2f %8.1f %8.1f %6s",
                      pt.security_level, pt.p, pt.n0, pt.r0, pt.t, pt.log2_candidates, pt.key_kilobytes(),
                      pt.log2_wf_key_recovery, pt.log2_wf_decoding,
                      pt.meets_security_level ? "yes" : "no");
        os << buf << '\n';
    }
}

inline void write_design_csv(std::ostream& os, const std::vector<DesignPoint>& points) {
    os << "sl,p,n0,r0,t,log2_nw,ks_kb,wf_kr,wf_da,meets\n";
    char buf[160];
    for (const auto& pt : points) {
        std::snprintf(buf, sizeof buf, "%u,%u,%u,%u,%u,%.3f,%.3f,%.3f,%.3f,%d", pt.security_level, pt.p,
                      pt.n0, pt.r0, pt.t, pt.log2_candidates, pt.key_kilobytes(), pt.log2_wf_key_recovery,
                      pt.log2_wf_decoding, pt.meets_security_level ? 1 : 0);
        os << buf << '\n';
    }
}

}  // namespace mmce
