#include "cli.hpp"

#include "mubsa/analysis.hpp"
#include "mubsa/io.hpp"
#include "mubsa/mub_family.hpp"
#include "mubsa/prime.hpp"
#include "mubsa/protocol.hpp"
#include "mubsa/random_model.hpp"
#include "mubsa/spectra.hpp"
#include "mubsa/transform.hpp"
#include "mubsa/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace mubsa::cli {
namespace {

using nlohmann::json;

/// Everything needed to reproduce one invocation bitwise: the resolved
/// options, the seed, and digests of every file read or written.
struct RunManifest {
    std::string subcommand;
    std::map<std::string, std::string> config;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    void write(const std::string& anchor_path) const {
        json doc;
        doc["tool"] = "mubsa";
        doc["version"] = std::string(kVersion);
        doc["subcommand"] = subcommand;
        doc["config"] = config;
        if (seed) doc["seed"] = *seed;
        json in = json::object(), out = json::object();
        for (const auto& p : inputs) in[p] = file_digest(p);
        for (const auto& p : outputs) out[p] = file_digest(p);
        doc["inputs"] = in;
        doc["outputs"] = out;
        std::ofstream f(anchor_path + ".manifest.json");
        if (!f) {
            throw std::runtime_error("cannot write manifest for " +
                                     anchor_path);
        }
        f << doc.dump(2) << '\n';
    }
};

std::vector<int> parse_index_list(const std::string& text) {
    std::vector<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find(',', start);
        const std::string piece =
            text.substr(start, pos == std::string::npos ? pos : pos - start);
        if (!piece.empty()) out.push_back(std::stoi(piece));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (out.empty()) throw CLI::ValidationError("empty index list");
    return out;
}

int cmd_gen_mub(int d, const std::string& out_path, RunManifest manifest) {
    const MubFamily family =
        d == 4 ? channel_family(4) : MubFamily::build(d);
    write_family_file(out_path, family);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    const MubVerifyReport report = verify_mub(family, 1e-10);
    std::cout << "wrote " << d + 1 << " bases to " << out_path
              << " (unitarity dev " << report.unitarity_deviation
              << ", unbiasedness dev " << report.unbiasedness_deviation
              << ")\n";
    return 0;
}

int cmd_transform(int d, int base, bool inverse, const std::string& in_path,
                  const std::string& out_path, RunManifest manifest) {
    const Eigen::VectorXcd x = read_vector_file(in_path);
    if (x.size() != d) {
        throw std::invalid_argument("input vector length does not match --d");
    }
    MubTransformer tx(d);
    const Eigen::VectorXcd y =
        inverse ? tx.synthesize(x, base) : tx.analyze(x, base);
    write_vector_file(out_path, y);
    manifest.inputs.push_back(in_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

int cmd_spectra(const std::string& in_path, const std::string& out_path,
                int expected_d, RunManifest manifest) {
    const Eigen::MatrixXcd m = read_matrix_file(in_path);
    if (expected_d > 0 && m.rows() != expected_d) {
        throw std::invalid_argument("matrix dimension does not match --d");
    }
    const CorrelationMatrix rx = CorrelationMatrix::checked(m);
    const MubFamily family = channel_family(rx.dim());
    const CompleteSpectra spectra = spectra_of(rx, family);
    write_spectra_file(out_path, spectra);
    manifest.inputs.push_back(in_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

int cmd_reconstruct(const std::string& in_path, const std::string& out_path,
                    RunManifest manifest) {
    const CompleteSpectra spectra = read_spectra_file(in_path);
    const MubFamily family = channel_family(spectra.d);
    const Reconstruction rec = reconstruct(spectra, family);
    if (!rec.psd) {
        std::cerr << "reconstruction is not positive semidefinite "
                     "(min eigenvalue "
                  << rec.min_eigenvalue
                  << "): the spectra are not realizable\n";
        return 1;
    }
    write_matrix_file(out_path, rec.matrix, 0);
    manifest.inputs.push_back(in_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

int cmd_synthesize(const std::string& spectra_path, int count,
                   std::uint64_t seed, const std::string& dist,
                   const std::string& out_path, RunManifest manifest) {
    const CompleteSpectra spectra = read_spectra_file(spectra_path);
    const MubFamily family = channel_family(spectra.d);
    const SourceDistribution distribution =
        dist == "gaussian" ? SourceDistribution::gaussian
                           : SourceDistribution::rademacher;
    RandomSource rng(seed);
    const Eigen::MatrixXcd samples =
        synthesize_from_spectra(spectra, family, count, distribution, rng);
    write_samples_file(out_path, samples);
    manifest.inputs.push_back(spectra_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

int cmd_stabilize(const std::string& in_path, const std::string& indices,
                  std::uint64_t seed, const std::string& out_path,
                  RunManifest manifest) {
    const Eigen::MatrixXcd samples = read_samples_file(in_path);
    const MubFamily family =
        channel_family(static_cast<int>(samples.rows()));
    RandomSource rng(seed);
    const Eigen::MatrixXcd out =
        stabilize(samples, parse_index_list(indices), family, rng);
    write_samples_file(out_path, out);
    manifest.inputs.push_back(in_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

RandomOperator builtin_operator(const std::string& name,
                                const MubFamily& family) {
    if (name == "identity") {
        return [](const Eigen::MatrixXcd& in, RandomSource&) { return in; };
    }
    if (name == "white-noise") {
        const int d = family.dim();
        return [d](const Eigen::MatrixXcd& in, RandomSource& rng) {
            Eigen::MatrixXcd out(d, in.cols());
            for (Eigen::Index c = 0; c < in.cols(); ++c) {
                for (int r = 0; r < d; ++r) {
                    out(r, c) = rng.circular_gaussian(1.0 / d);
                }
            }
            return out;
        };
    }
    if (name.rfind("stabilize-", 0) == 0) {
        const std::vector<int> indices = parse_index_list(name.substr(10));
        return [indices, &family](const Eigen::MatrixXcd& in,
                                  RandomSource& rng) {
            return stabilize(in, indices, family, rng);
        };
    }
    throw std::invalid_argument(
        "unknown operator '" + name +
        "'; expected identity, white-noise, or stabilize-<indices>");
}

int cmd_characterize(const std::string& op_name, int d, int probes,
                     std::uint64_t seed, const std::string& out_path,
                     RunManifest manifest) {
    const MubFamily family = channel_family(d);
    const RandomOperator op = builtin_operator(op_name, family);
    RandomSource rng(seed);
    const OperatorCharacterization ch =
        characterize_operator(op, family, probes, rng);
    const OperatorClassification cls = classify_operator(ch);

    json doc;
    doc["d"] = d;
    doc["operator"] = op_name;
    doc["samples_per_probe"] = probes;
    json dmats = json::array(), errs = json::array();
    for (int k = 0; k <= d; ++k) {
        json rows = json::array(), erows = json::array();
        for (int r = 0; r < d; ++r) {
            rows.push_back(std::vector<double>(
                ch.D[k].row(r).data(), ch.D[k].row(r).data() + ch.D[k].cols()));
            erows.push_back(std::vector<double>(
                ch.std_err[k].row(r).data(),
                ch.std_err[k].row(r).data() + ch.std_err[k].cols()));
        }
        dmats.push_back(rows);
        errs.push_back(erows);
    }
    doc["D"] = dmats;
    doc["std_err"] = errs;
    doc["classification"]["stationarizing"] = cls.stationarizing;
    doc["classification"]["switch_source"] = cls.switch_source;
    doc["classification"]["untouched_filter_targets"] =
        cls.untouched_filter_targets;

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << doc.dump(2) << '\n';
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    return 0;
}

int cmd_simulate_mac(const std::string& config_path,
                     const std::string& out_path, RunManifest manifest) {
    const ProtocolConfig config = read_protocol_config(config_path);
    manifest.seed = config.has_seed ? std::optional(config.seed) : std::nullopt;
    const ProtocolMetrics metrics = run_mac_simulation(config);
    write_metrics_file(out_path, metrics);
    manifest.inputs.push_back(config_path);
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    std::cout << "min pair accuracy " << metrics.min_accuracy << " over "
              << metrics.pairs.size() << " pairs, "
              << metrics.replicates << " replicates\n";
    return 0;
}

int cmd_detect(const std::string& spectra_path, double threshold) {
    const CompleteSpectra spectra = read_spectra_file(spectra_path);
    const DetectionReport report = detect_signal(spectra, threshold);
    for (int k = 0; k <= spectra.d; ++k) {
        std::cout << "spectrum " << k + 1 << ": deviation "
                  << report.deviations[k]
                  << (report.flags[k] ? "  [flag]" : "") << '\n';
    }
    std::cout << (report.any ? "signal detected" : "no signal") << '\n';
    return 0;
}

int cmd_compress(const std::string& in_path, int d, const std::string& bases,
                 const std::string& out_path, RunManifest manifest) {
    const Eigen::VectorXcd x = read_vector_file(in_path);
    if (x.size() != d) {
        throw std::invalid_argument("input vector length does not match --d");
    }
    const MubFamily family = channel_family(d);
    std::vector<int> candidates;
    if (bases.empty()) {
        for (int k = 1; k <= d + 1; ++k) candidates.push_back(k);
    } else {
        candidates = parse_index_list(bases);
    }
    const CompressionResult result = best_base_compress(x, family, candidates);
    std::cout << "base " << result.base_index << ", merit " << result.merit
              << ", side information " << result.side_information_bits
              << " bits\n";
    if (!out_path.empty()) {
        write_vector_file(out_path, result.spectrum);
        manifest.inputs.push_back(in_path);
        manifest.outputs.push_back(out_path);
        manifest.write(out_path);
    }
    return 0;
}

int cmd_experiment(int d, int k, int trials, std::uint64_t seed,
                   const std::string& out_path, RunManifest manifest) {
    RandomSource rng(seed);
    const MubVsHaarReport report =
        mub_vs_random_experiment(d, k, trials, rng);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open " + out_path);
    out << "d,bases,trials,threshold,p_mub,ci_mub,p_haar,ci_haar,"
           "mean_mub,se_mub,mean_haar,se_haar\n";
    out << report.d << ',' << report.bases << ',' << report.trials << ','
        << format_double(report.threshold) << ','
        << format_double(report.p_mub) << ',' << format_double(report.ci_mub)
        << ',' << format_double(report.p_haar) << ','
        << format_double(report.ci_haar) << ','
        << format_double(report.mean_mub) << ','
        << format_double(report.se_mub) << ','
        << format_double(report.mean_haar) << ','
        << format_double(report.se_haar) << '\n';
    out.close();
    manifest.outputs.push_back(out_path);
    manifest.write(out_path);
    std::cout << "exceedance at " << report.threshold << ": unbiased bases "
              << report.p_mub << " +- " << report.ci_mub << ", random bases "
              << report.p_haar << " +- " << report.ci_haar << '\n';
    return 0;
}

int cmd_replicate(bool quick, std::uint64_t seed) {
    int failures = 0;
    auto line = [&](const std::string& name, bool pass,
                    const std::string& detail) {
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail
                  << '\n';
        if (!pass) ++failures;
    };

    ProtocolConfig cfg;
    cfg.d = 4;
    cfg.n = 10;
    cfg.slots_per_user = 2;
    cfg.rounds = 1000;
    cfg.gap = 0.2;
    cfg.replicates = quick ? 50 : 200;
    cfg.seed = seed;
    cfg.has_seed = true;
    const ProtocolMetrics metrics = run_mac_simulation(cfg);
    line("channel example (d=4, n=10, 1000 rounds)",
         metrics.min_accuracy >= 2.0 / 3.0,
         "min pair accuracy " + format_double(metrics.min_accuracy) +
             " over 90 ordered pairs");

    RandomSource rng(seed);
    const MubVsHaarReport cmp =
        mub_vs_random_experiment(5, 6, quick ? 10000 : 100000, rng);
    const bool ok =
        cmp.p_mub >= cmp.p_haar - 2.0 * (cmp.ci_mub + cmp.ci_haar);
    line("base comparison (d=5, 6 bases)", ok,
         "exceedance " + format_double(cmp.p_mub) + " vs " +
             format_double(cmp.p_haar) + " at threshold " +
             format_double(cmp.threshold));
    std::cout << "expectation report: unbiased " << cmp.mean_mub << " +- "
              << cmp.se_mub << ", random " << cmp.mean_haar << " +- "
              << cmp.se_haar << " (reported, not asserted)\n";
    if (quick) std::cout << "note: reduced trial counts, approximate\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"mutually unbiased bases spectral analysis toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "cap on worker threads (results are identical at any cap)");

    // shared option storage
    int d = 0, base = 0, count = 0, probes = 0, trials = 0, k_bases = 0;
    bool inverse = false, quick = false;
    std::uint64_t seed = 0;
    double threshold = 0.0;
    std::string in_path, out_path, spectra_path, config_path;
    std::string dist = "rademacher", op_name, indices, bases_list;

    auto* gen = app.add_subcommand("gen-mub", "construct a basis family");
    gen->add_option("--d", d, "dimension (odd prime, or 4)")->required();
    gen->add_option("--out", out_path, "output file")->required();

    auto* tr = app.add_subcommand("transform", "analyze or synthesize in one base");
    tr->add_option("--d", d, "dimension (odd prime)")->required();
    tr->add_option("--base", base, "base index 1..d+1")->required();
    tr->add_flag("--inverse", inverse, "synthesize instead of analyze");
    tr->add_option("--in", in_path, "input vector file")->required();
    tr->add_option("--out", out_path, "output vector file")->required();

    auto* sp = app.add_subcommand("spectra", "correlation matrix to spectra");
    sp->add_option("--in", in_path, "correlation matrix file")->required();
    sp->add_option("--d", d, "expected dimension (checked against the file)");
    sp->add_option("--out", out_path, "spectra CSV")->required();

    auto* rc = app.add_subcommand("reconstruct", "spectra to correlation matrix");
    rc->add_option("--in", in_path, "spectra CSV")->required();
    rc->add_option("--out", out_path, "correlation matrix file")->required();

    auto* sy = app.add_subcommand("synthesize", "sample a vector with given spectra");
    sy->add_option("--spectra", spectra_path, "spectra CSV")->required();
    sy->add_option("--count", count, "sample count")->required();
    sy->add_option("--seed", seed, "random seed")->required();
    sy->add_option("--dist", dist, "rademacher or gaussian");
    sy->add_option("--out", out_path, "samples file")->required();

    auto* st = app.add_subcommand("stabilize", "flatten selected spectra of samples");
    st->add_option("--in", in_path, "samples file")->required();
    st->add_option("--indices", indices, "comma-separated base indices")->required();
    st->add_option("--seed", seed, "random seed")->required();
    st->add_option("--out", out_path, "samples file")->required();

    auto* ch = app.add_subcommand("characterize", "estimate operator response matrices");
    ch->add_option("--op", op_name,
                   "identity, white-noise, or stabilize-<indices>")->required();
    ch->add_option("--d", d, "dimension")->required();
    ch->add_option("--probes", probes, "samples per probe")->required();
    ch->add_option("--seed", seed, "random seed")->required();
    ch->add_option("--out", out_path, "JSON output")->required();

    auto* sim = app.add_subcommand("simulate-mac", "run the multiple-access simulation");
    sim->add_option("--config", config_path, "flat key-value config")->required();
    sim->add_option("--out", out_path, "metrics CSV")->required();

    auto* de = app.add_subcommand("detect", "entropy-based signal detection");
    de->add_option("--spectra", spectra_path, "spectra CSV")->required();
    de->add_option("--threshold", threshold, "per-spectrum deviation threshold")
        ->required();

    auto* co = app.add_subcommand("compress", "best-base selection for a vector");
    co->add_option("--in", in_path, "vector file")->required();
    co->add_option("--d", d, "dimension")->required();
    co->add_option("--bases", bases_list, "candidate bases, e.g. 1,2,5");
    co->add_option("--out", out_path, "optional spectrum output");

    auto* ex = app.add_subcommand("experiment", "statistical experiments");
    auto* mvh = ex->add_subcommand("mub-vs-haar",
                                   "threshold exceedance, fixed vs random bases");
    mvh->add_option("--d", d, "dimension (odd prime)")->required();
    mvh->add_option("--k", k_bases, "number of bases")->required();
    mvh->add_option("--trials", trials, "Monte Carlo trials")->required();
    mvh->add_option("--seed", seed, "random seed")->required();
    mvh->add_option("--out", out_path, "report CSV")->required();
    ex->require_subcommand(1);

    auto* rep = app.add_subcommand("replicate", "re-run the bundled scenarios");
    rep->add_flag("--quick", quick, "reduced trials, approximate");
    rep->add_option("--seed", seed, "random seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    RunManifest manifest;
    for (const auto* sub :
         {gen, tr, sp, rc, sy, st, ch, sim, de, co, rep}) {
        if (sub->parsed()) manifest.subcommand = sub->get_name();
    }
    if (ex->parsed()) manifest.subcommand = "experiment mub-vs-haar";
    auto note = [&](const std::string& key, const std::string& value) {
        if (!value.empty()) manifest.config[key] = value;
    };
    note("d", d ? std::to_string(d) : "");
    note("base", base ? std::to_string(base) : "");
    note("count", count ? std::to_string(count) : "");
    note("probes", probes ? std::to_string(probes) : "");
    note("trials", trials ? std::to_string(trials) : "");
    note("k", k_bases ? std::to_string(k_bases) : "");
    note("inverse", inverse ? "true" : "");
    note("dist", dist != "rademacher" ? dist : "");
    note("op", op_name);
    note("indices", indices);
    note("bases", bases_list);
    note("threshold", threshold != 0.0 ? format_double(threshold) : "");
    if (sy->parsed() || st->parsed() || ch->parsed() || ex->parsed() ||
        rep->parsed()) {
        manifest.seed = seed;
    }

    try {
        if (gen->parsed()) return cmd_gen_mub(d, out_path, manifest);
        if (tr->parsed()) {
            return cmd_transform(d, base, inverse, in_path, out_path, manifest);
        }
        if (sp->parsed()) return cmd_spectra(in_path, out_path, d, manifest);
        if (rc->parsed()) return cmd_reconstruct(in_path, out_path, manifest);
        if (sy->parsed()) {
            return cmd_synthesize(spectra_path, count, seed, dist, out_path,
                                  manifest);
        }
        if (st->parsed()) {
            return cmd_stabilize(in_path, indices, seed, out_path, manifest);
        }
        if (ch->parsed()) {
            return cmd_characterize(op_name, d, probes, seed, out_path,
                                    manifest);
        }
        if (sim->parsed()) {
            return cmd_simulate_mac(config_path, out_path, manifest);
        }
        if (de->parsed()) return cmd_detect(spectra_path, threshold);
        if (co->parsed()) {
            return cmd_compress(in_path, d, bases_list, out_path, manifest);
        }
        if (ex->parsed()) {
            return cmd_experiment(d, k_bases, trials, seed, out_path,
                                  manifest);
        }
        if (rep->parsed()) {
            return cmd_replicate(quick, rep->count("--seed") ? seed
                                                             : 0x6d7562736175ull);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    }
    std::cerr << app.help();
    return 1;
}

} // namespace mubsa::cli
