// Command-line front end: key generation, encryption/decryption, DFR
// estimation, the reaction-attack harness, spectrum export, graph/clique key
// recovery and the parameter-design table. Every experiment command is a
// pure function of its configuration and seed.
//
// Exit codes: 0 success, 2 decoding failure (decrypt), 1 usage or I/O error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mmce/attack.hpp"
#include "mmce/design.hpp"
#include "mmce/exponent_matrix.hpp"
#include "mmce/recovery.hpp"
#include "mmce/scheme.hpp"

namespace {

constexpr std::uint64_t kKeygenStream = ~0ULL;  // never collides with trial/query indices

constexpr const char* kPlainHeader = "MONOMIAL-MCELIECE-PT v1";
constexpr const char* kCipherHeader = "MONOMIAL-MCELIECE-CT v1";

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

void write_bits_file(const std::string& path, const char* header, const mmce::BitVector& bits) {
    auto os = open_out(path);
    os << header << '\n' << bits.size() << '\n' << bits.to_hex() << '\n';
}

mmce::BitVector read_bits_file(const std::string& path, const char* header) {
    auto is = open_in(path);
    std::string line;
    if (!std::getline(is, line) || line != header) throw std::runtime_error(path + ": bad header");
    std::size_t nbits = 0;
    if (!(is >> nbits)) throw std::runtime_error(path + ": bad length line");
    std::string hex;
    if (!(is >> hex)) throw std::runtime_error(path + ": missing payload");
    return mmce::BitVector::from_hex(hex, nbits);
}

struct ParamArgs {
    std::string preset;
    std::uint32_t p = 0, r0 = 0, n0 = 0, t = 0, m = 1;
    std::uint32_t max_iters = 10;
    std::uint32_t fixed_threshold = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--preset", preset, "Parameter preset: sl80, sl128 or sl256")
            ->check(CLI::IsMember({"sl80", "sl128", "sl256"}));
        cmd->add_option("--p", p, "Circulant size (prime)");
        cmd->add_option("--r0", r0, "Block rows (generic monomial code)");
        cmd->add_option("--n0", n0, "Block columns (generic monomial code)");
        cmd->add_option("--t", t, "Error weight");
        cmd->add_option("--m", m, "Row/column weight of the transformation Q (1 = identity)");
        cmd->add_option("--max-iters", max_iters, "Decoder iteration cap");
        cmd->add_option("--fixed-threshold", fixed_threshold,
                        "Fixed bit-flip threshold (0 = majority rule)");
    }

    mmce::SchemeParams resolve() const {
        std::uint32_t pp = p, tt = t;
        if (!preset.empty()) {
            for (const auto& pre : mmce::design_presets())
                if (preset == pre.name) {
                    pp = pre.p;
                    tt = t ? t : pre.t;
                }
        }
        if (pp == 0) throw CLI::ValidationError("parameters", "need --preset or --p");
        if (tt == 0) throw CLI::ValidationError("parameters", "need --t (or a preset)");
        mmce::SchemeParams sp = (r0 || n0) ? mmce::SchemeParams::generic(pp, r0, n0, tt, m)
                                           : mmce::SchemeParams::full_spectrum(pp, tt, m);
        sp.decoder.max_iters = max_iters;
        if (fixed_threshold > 0) {
            sp.decoder.rule = mmce::ThresholdRule::Fixed;
            sp.decoder.fixed_threshold = fixed_threshold;
        }
        return sp;
    }
};

void print_estimate_report(std::ostream& os, const mmce::SpectrumEstimate& est,
                           const mmce::DistanceSpectrum* truth) {
    const std::size_t nd = static_cast<std::size_t>(est.p / 2) + 1;
    for (std::uint32_t i = 0; i < est.n0; ++i)
        for (std::uint32_t j = i + 1; j < est.n0; ++j) {
            os << i << ' ' << j << " :";
            for (std::uint32_t d = 0; d < nd; ++d)
                if (est.at(i, j, d) == mmce::Mark::Present) os << ' ' << d;
            std::size_t undecided = 0;
            for (std::uint32_t d = 0; d < nd; ++d)
                if (est.at(i, j, d) == mmce::Mark::Undecided) ++undecided;
            if (undecided) os << "  (undecided: " << undecided << ")";
            os << '\n';
        }
    if (truth) {
        const mmce::AccuracyMetrics acc = mmce::spectrum_accuracy(est, *truth);
        os << "precision=" << acc.precision << " recall=" << acc.recall << " undecided=" << acc.undecided
           << '\n';
    }
}

int run(int argc, char** argv) {
    CLI::App app{"monomial-code McEliece laboratory"};
    app.require_subcommand(1);

    // keygen
    auto* keygen_cmd = app.add_subcommand("keygen", "Generate a key pair");
    ParamArgs kg_params;
    kg_params.attach(keygen_cmd);
    std::uint64_t kg_seed = 0;
    std::string kg_out;
    keygen_cmd->add_option("--seed", kg_seed, "RNG seed")->required();
    keygen_cmd->add_option("--out", kg_out, "Output prefix (writes <out>.sk and <out>.pk)")->required();

    // encrypt
    auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a plaintext file");
    std::string enc_key, enc_in, enc_out;
    std::uint64_t enc_seed = 0;
    std::uint32_t enc_t = 0;
    encrypt_cmd->add_option("--key", enc_key, "Public key file")->required();
    encrypt_cmd->add_option("--in", enc_in, "Plaintext file")->required();
    encrypt_cmd->add_option("--out", enc_out, "Ciphertext file")->required();
    encrypt_cmd->add_option("--seed", enc_seed, "RNG seed for the error vector")->required();
    encrypt_cmd->add_option("--t", enc_t, "Error weight override (default: key's t)");

    // decrypt
    auto* decrypt_cmd = app.add_subcommand("decrypt", "Decrypt a ciphertext file");
    std::string dec_key, dec_in, dec_out;
    std::uint32_t dec_max_iters = 10, dec_fixed = 0;
    decrypt_cmd->add_option("--key", dec_key, "Private key file")->required();
    decrypt_cmd->add_option("--in", dec_in, "Ciphertext file")->required();
    decrypt_cmd->add_option("--out", dec_out, "Plaintext output file")->required();
    decrypt_cmd->add_option("--max-iters", dec_max_iters, "Decoder iteration cap");
    decrypt_cmd->add_option("--fixed-threshold", dec_fixed,
                            "Fixed bit-flip threshold (0 = majority rule)");

    // dfr
    auto* dfr_cmd = app.add_subcommand("dfr", "Monte-Carlo decoding failure rate");
    ParamArgs dfr_params;
    dfr_params.attach(dfr_cmd);
    std::uint64_t dfr_trials = 1000, dfr_seed = 0;
    std::uint32_t dfr_t = 0;
    std::string dfr_out;
    dfr_cmd->add_option("--trials", dfr_trials, "Number of trials");
    dfr_cmd->add_option("--seed", dfr_seed, "RNG seed")->required();
    dfr_cmd->add_option("--error-weight", dfr_t, "Trial error weight (default: scheme t)");
    dfr_cmd->add_option("--out", dfr_out, "Optional CSV output");

    // attack
    auto* attack_cmd = app.add_subcommand("attack", "Reaction attack against a failure oracle");
    ParamArgs atk_params;
    atk_params.attach(attack_cmd);
    std::uint64_t atk_queries = 10000, atk_seed = 0, atk_min_samples = 100;
    std::string atk_key, atk_out, atk_estimate;
    std::uint32_t atk_expected = 0;
    std::uint64_t atk_progress = 0;
    attack_cmd->add_option("--key", atk_key, "Private key file (default: generate from seed)");
    attack_cmd->add_option("--queries", atk_queries, "Query budget");
    attack_cmd->add_option("--seed", atk_seed, "RNG seed")->required();
    attack_cmd->add_option("--out", atk_out, "Counters CSV output")->required();
    attack_cmd->add_option("--estimate", atk_estimate, "Spectrum estimate report output");
    attack_cmd->add_option("--expected-size", atk_expected,
                           "Known per-pair spectrum size (0 = cluster)");
    attack_cmd->add_option("--min-samples", atk_min_samples, "Minimum totals per counter cell");
    attack_cmd->add_option("--progress", atk_progress, "Progress line interval (stderr)");

    // spectrum
    auto* spectrum_cmd = app.add_subcommand("spectrum", "Distance spectrum of a key or matrix");
    std::string spec_key, spec_matrix, spec_out;
    spectrum_cmd->add_option("--key", spec_key, "Private key file");
    spectrum_cmd->add_option("--matrix", spec_matrix, "Exponent matrix file");
    spectrum_cmd->add_option("--out", spec_out, "Spectrum output file")->required();

    // recover
    auto* recover_cmd = app.add_subcommand("recover", "Clique-based recovery from a spectrum");
    std::string rec_spectrum, rec_graph_out, rec_out, rec_pubkey;
    std::uint64_t rec_limit = 1000000, rec_seed = 1;
    std::uint32_t rec_r0 = 0, rec_candidates = 4, rec_probes = 0, rec_probe_t = 0;
    recover_cmd->add_option("--spectrum", rec_spectrum, "Spectrum file")->required();
    recover_cmd->add_option("--limit", rec_limit, "Clique enumeration cap");
    recover_cmd->add_option("--r0", rec_r0, "Rows per candidate (enables assembly)");
    recover_cmd->add_option("--candidates", rec_candidates, "Max candidates to assemble");
    recover_cmd->add_option("--graph-out", rec_graph_out, "Edge list output");
    recover_cmd->add_option("--out", rec_out, "Clique list output");
    recover_cmd->add_option("--pubkey", rec_pubkey, "Public key for probe validation");
    recover_cmd->add_option("--probes", rec_probes, "Probe count for validation");
    recover_cmd->add_option("--probe-t", rec_probe_t, "Probe error weight");
    recover_cmd->add_option("--seed", rec_seed, "Probe RNG seed");

    // design
    auto* design_cmd = app.add_subcommand("design", "Parameter design table");
    std::uint32_t des_sl = 0, des_p = 0, des_t = 0;
    std::string des_csv;
    design_cmd->add_option("--sl", des_sl, "Target security level (custom row)");
    design_cmd->add_option("--p", des_p, "Circulant size (custom row)");
    design_cmd->add_option("--t", des_t, "Error weight (custom row)");
    design_cmd->add_option("--csv", des_csv, "CSV output file");

    CLI11_PARSE(app, argc, argv);

    if (keygen_cmd->parsed()) {
        const mmce::SchemeParams sp = kg_params.resolve();
        mmce::Rng rng = mmce::Rng::stream(kg_seed, kKeygenStream);
        const mmce::KeyPair kp = mmce::keygen(sp, rng);
        {
            auto os = open_out(kg_out + ".sk");
            mmce::save_private_key(os, kp.sk);
        }
        {
            auto os = open_out(kg_out + ".pk");
            mmce::save_public_key(os, kp.pk);
        }
        std::cout << "keygen p=" << sp.p << " r0=" << sp.r0 << " n0=" << sp.n0 << " t=" << sp.t
                  << " m=" << sp.m << " public_key_bits=" << mmce::key_size_bits(sp.p, sp.r0, sp.n0)
                  << '\n';
        return 0;
    }

    if (encrypt_cmd->parsed()) {
        auto is = open_in(enc_key);
        mmce::PublicKey pk = mmce::load_public_key(is);
        const mmce::BitVector u = read_bits_file(enc_in, kPlainHeader);
        const std::uint32_t t = enc_t ? enc_t : pk.t;
        mmce::Rng rng(enc_seed);
        const mmce::BitVector e = mmce::BitVector::random_weight(pk.n_bits(), t, rng);
        const mmce::BitVector x = mmce::encrypt(pk, u, e, t);
        write_bits_file(enc_out, kCipherHeader, x);
        std::cout << "encrypt n_bits=" << x.size() << " t=" << t << '\n';
        return 0;
    }

    if (decrypt_cmd->parsed()) {
        auto is = open_in(dec_key);
        mmce::PrivateKey sk = mmce::load_private_key(is);
        sk.params.decoder.max_iters = dec_max_iters;
        if (dec_fixed > 0) {
            sk.params.decoder.rule = mmce::ThresholdRule::Fixed;
            sk.params.decoder.fixed_threshold = dec_fixed;
        }
        const mmce::BitVector x = read_bits_file(dec_in, kCipherHeader);
        const mmce::DecryptResult res = mmce::decrypt(sk, x);
        if (res.status != mmce::DecryptStatus::Ok) {
            std::cout << "decoding failure after " << res.iterations << " iterations\n";
            return 2;
        }
        write_bits_file(dec_out, kPlainHeader, res.u);
        std::cout << "decrypt ok iterations=" << res.iterations << '\n';
        return 0;
    }

    if (dfr_cmd->parsed()) {
        const mmce::SchemeParams sp = dfr_params.resolve();
        mmce::Rng rng = mmce::Rng::stream(dfr_seed, kKeygenStream);
        const mmce::KeyPair kp = mmce::keygen(sp, rng);
        const std::uint32_t t = dfr_t ? dfr_t : sp.t;
        const mmce::DfrEstimate est = mmce::estimate_dfr(kp, t, dfr_trials, dfr_seed);
        std::ostringstream line;
        line << "trials=" << est.trials << " failures=" << est.failures
             << " miscorrections=" << est.miscorrections << " rate=" << est.rate << " ci95=["
             << est.ci_low << ',' << est.ci_high << "]";
        std::cout << line.str() << '\n';
        if (!dfr_out.empty()) {
            auto os = open_out(dfr_out);
            os << "trials,failures,miscorrections,rate,ci_low,ci_high\n";
            os << est.trials << ',' << est.failures << ',' << est.miscorrections << ',' << est.rate << ','
               << est.ci_low << ',' << est.ci_high << '\n';
        }
        return 0;
    }

    if (attack_cmd->parsed()) {
        mmce::KeyPair kp;
        if (atk_key.empty()) {
            const mmce::SchemeParams sp = atk_params.resolve();
            mmce::Rng rng = mmce::Rng::stream(atk_seed, kKeygenStream);
            kp = mmce::keygen(sp, rng);
        } else {
            auto is = open_in(atk_key);
            kp.sk = mmce::load_private_key(is);
            kp.sk.params.decoder.max_iters = atk_params.max_iters;
            if (atk_params.fixed_threshold > 0) {
                kp.sk.params.decoder.rule = mmce::ThresholdRule::Fixed;
                kp.sk.params.decoder.fixed_threshold = atk_params.fixed_threshold;
            }
            kp.pk = mmce::public_from_private(kp.sk);
        }
        const mmce::FailureOracle oracle = mmce::make_oracle(kp);
        mmce::AttackOptions opts;
        opts.progress_every = atk_progress ? atk_progress : std::max<std::uint64_t>(1, atk_queries / 10);
        opts.progress_stream = &std::cerr;
        const mmce::AttackResult res = mmce::run_attack(oracle, kp.pk, atk_queries, atk_seed, opts);
        {
            auto os = open_out(atk_out);
            mmce::write_counters_csv(os, res.counters);
        }
        std::cout << "attack queries=" << res.queries << " failures=" << res.failures
                  << (res.aborted ? " aborted=true" : "") << '\n';
        mmce::ClassifyOptions copts;
        copts.expected_size = atk_expected;
        copts.min_samples = atk_min_samples;
        const mmce::SpectrumEstimate est = mmce::classify_spectrum(res.counters, copts);
        const mmce::DistanceSpectrum truth = mmce::distance_spectrum(kp.sk.W);
        print_estimate_report(std::cout, est, &truth);
        if (!atk_estimate.empty()) {
            auto os = open_out(atk_estimate);
            print_estimate_report(os, est, &truth);
        }
        return 0;
    }

    if (spectrum_cmd->parsed()) {
        mmce::ExponentMatrix w;
        if (!spec_key.empty()) {
            auto is = open_in(spec_key);
            w = mmce::load_private_key(is).W;
        } else if (!spec_matrix.empty()) {
            auto is = open_in(spec_matrix);
            w = mmce::read_exponent_matrix(is);
        } else {
            throw CLI::ValidationError("spectrum", "need --key or --matrix");
        }
        const mmce::DistanceSpectrum s = mmce::distance_spectrum(w);
        {
            auto os = open_out(spec_out);
            mmce::write_spectrum(os, s);
        }
        std::cout << "spectrum p=" << s.p << " n0=" << s.n0
                  << " full_spectrum=" << (mmce::is_full_spectrum(s) ? "true" : "false") << '\n';
        return 0;
    }

    if (recover_cmd->parsed()) {
        auto is = open_in(rec_spectrum);
        const mmce::DistanceSpectrum s = mmce::read_spectrum(is);
        const mmce::SpectrumGraph g = mmce::build_graph(s);
        if (!rec_graph_out.empty()) {
            auto os = open_out(rec_graph_out);
            mmce::export_edge_list(os, g);
        }
        const mmce::CliqueList cliques = mmce::enumerate_cliques(g, rec_limit);
        std::cout << "nodes=" << g.node_count() << " edges=" << g.edge_count()
                  << " cliques=" << cliques.cliques.size()
                  << " truncated=" << (cliques.truncated ? "true" : "false") << '\n';
        if (!rec_out.empty()) {
            auto os = open_out(rec_out);
            mmce::export_cliques(os, cliques);
        }
        if (rec_r0 > 0) {
            mmce::AssembleOptions aopts;
            aopts.max_candidates = rec_candidates;
            const auto candidates = mmce::assemble_candidates(cliques.cliques, s, rec_r0, aopts);
            std::cout << "candidates=" << candidates.size() << '\n';
            if (!rec_pubkey.empty() && rec_probes > 0) {
                auto pis = open_in(rec_pubkey);
                const mmce::PublicKey pk = mmce::load_public_key(pis);
                const std::uint32_t probe_t = rec_probe_t ? rec_probe_t : 1;
                const auto probes = mmce::make_probes(pk, rec_probes, probe_t, rec_seed);
                for (std::size_t c = 0; c < candidates.size(); ++c)
                    std::cout << "candidate " << c << ": valid="
                              << (mmce::validate_candidate(candidates[c], probes) ? "true" : "false")
                              << '\n';
            }
        }
        return 0;
    }

    if (design_cmd->parsed()) {
        std::vector<mmce::DesignPoint> points;
        if (des_p != 0) {
            points.push_back(mmce::design_point(des_sl, des_p, des_t));
        } else {
            for (const auto& pre : mmce::design_presets())
                points.push_back(mmce::design_point(pre.security_level, pre.p, pre.t));
        }
        mmce::render_design_table(std::cout, points);
        if (!des_csv.empty()) {
            auto os = open_out(des_csv);
            mmce::write_design_csv(os, points);
        }
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
