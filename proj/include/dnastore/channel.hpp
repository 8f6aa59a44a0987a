// Substitution-error channel simulation and round-trip/package evaluation.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dnastore/bio_metrics.hpp"
#include "dnastore/package_io.hpp"
#include "dnastore/pipeline.hpp"
#include "dnastore/thermo.hpp"
#include "dnastore/util.hpp"

namespace dnastore::channel {

struct ChannelConfig {
    double substitution_rate = 0.0;  // per nucleotide
    std::uint64_t seed = 0;

    void validate() const {
        if (substitution_rate < 0.0 || substitution_rate > 1.0)
            throw std::invalid_argument("channel: substitution rate must lie in [0, 1]");
    }
};

// Each nucleotide is independently replaced by a uniformly random different
// base with the configured probability. Deterministic given the seed.
inline pipeline::StoragePackage inject_substitutions(const pipeline::StoragePackage& pkg,
                                                     const ChannelConfig& config) {
    config.validate();
    pipeline::StoragePackage out = pkg;
    std::mt19937_64 rng(config.seed);
    for (auto& rec : out.sequences) {
        std::string s = rec.seq.str();
        for (char& c : s) {
            if (uniform01(rng) >= config.substitution_rate) continue;
            const int current = base_index(c);
            const int replacement = (current + 1 + static_cast<int>(uniform_below(rng, 3))) % 4;
            c = kBases[replacement];
        }
        rec.seq = DnaSeq::unchecked(std::move(s));
    }
    return out;
}

struct ReconstructionReport {
    double reconstruction_rate = 1.0;  // fraction of source bytes recovered exactly
    double block_failure_rate = 0.0;   // fraction of blocks with >= 1 uncorrectable row
    pipeline::DecodeReport decode_report;
};

inline ReconstructionReport evaluate_roundtrip(std::span<const std::uint8_t> file,
                                               const pipeline::PipelineConfig& pipeline_config,
                                               const ChannelConfig& channel_config) {
    const pipeline::StoragePackage clean = pipeline::encode(file, pipeline_config);
    const pipeline::StoragePackage noisy = inject_substitutions(clean, channel_config);
    auto [decoded, report] = pipeline::decode(noisy, pipeline_config);

    ReconstructionReport out;
    out.decode_report = std::move(report);
    if (!file.empty()) {
        std::size_t matches = 0;
        for (std::size_t i = 0; i < file.size(); ++i)
            if (i < decoded.size() && decoded[i] == file[i]) ++matches;
        out.reconstruction_rate = static_cast<double>(matches) / static_cast<double>(file.size());
    }
    const std::size_t blocks = clean.header.block_count;
    if (blocks > 0) {
        std::vector<char> failed(blocks, 0);
        for (const auto& row : out.decode_report.rows)
            if (row.status == rs::DecodeStatus::uncorrectable) failed[row.block] = 1;
        const auto failures = static_cast<std::size_t>(
            std::count(failed.begin(), failed.end(), static_cast<char>(1)));
        out.block_failure_rate = static_cast<double>(failures) / static_cast<double>(blocks);
    }
    return out;
}

struct MetricsReport {
    double gc_mean = 0.0, gc_std = 0.0;    // percent
    double tm_mean = 0.0, tm_std = 0.0;    // degrees C
    double mfe_mean = 0.0, mfe_std = 0.0;  // kcal/mol per nt
    std::size_t homopolymer_max = 0;
    std::map<std::size_t, std::size_t> homopolymer_histogram;  // per-sequence max run
    double hairpin_total = 0.0;
    double net_information_density = 0.0;  // bits/nt; 0 when no header length
    std::vector<std::pair<std::size_t, double>> local_gc_mean;  // (position, percent)
    double encode_bits_per_second = 0.0;
    double decode_bits_per_second = 0.0;
};

// Aggregates sequence metrics over a package: means and population standard
// deviations; the local GC series is averaged per window start across
// sequences.
inline MetricsReport metrics_report(const pipeline::StoragePackage& pkg,
                                    const thermo::NnParameterTable& table,
                                    const thermo::ThermoConfig& thermo_config,
                                    const bio::HairpinParams& hairpin_params, std::size_t window,
                                    std::size_t step = 1) {
    if (pkg.sequences.empty()) throw std::domain_error("metrics_report: empty package");
    MetricsReport report;
    std::vector<double> gc, tm, mfe_per_nt;
    gc.reserve(pkg.sequences.size());
    std::map<std::size_t, std::pair<double, std::size_t>> local_acc;  // start -> (sum, count)
    std::size_t total_nt = 0;
    for (const auto& rec : pkg.sequences) {
        const DnaSeq& s = rec.seq;
        total_nt += s.size();
        gc.push_back(bio::gc_content(s));
        tm.push_back(thermo::melting_temperature(s, table, thermo_config));
        mfe_per_nt.push_back(thermo::mfe(s, s, table, thermo_config) /
                             static_cast<double>(s.size()));
        const std::size_t run = bio::homopolymer_max_run(s);
        report.homopolymer_max = std::max(report.homopolymer_max, run);
        ++report.homopolymer_histogram[run];
        report.hairpin_total += bio::hairpin_count(s, hairpin_params);
        if (window >= 1 && window <= s.size())
            for (const auto& [start, percent] : bio::local_gc(s, window, step).window_series) {
                auto& acc = local_acc[start];
                acc.first += percent;
                ++acc.second;
            }
    }
    auto mean_std = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(v.size())));
    };
    std::tie(report.gc_mean, report.gc_std) = mean_std(gc);
    std::tie(report.tm_mean, report.tm_std) = mean_std(tm);
    std::tie(report.mfe_mean, report.mfe_std) = mean_std(mfe_per_nt);
    if (total_nt > 0)
        report.net_information_density =
            static_cast<double>(pkg.header.original_length) * 8.0 / static_cast<double>(total_nt);
    for (const auto& [start, acc] : local_acc)
        report.local_gc_mean.emplace_back(start, acc.first / static_cast<double>(acc.second));
    return report;
}

// Wall-clock throughput over >= 3 repetitions; medians, single-threaded.
inline std::pair<double, double> measure_throughput(std::span<const std::uint8_t> file,
                                                    const pipeline::PipelineConfig& config,
                                                    std::size_t repetitions = 3) {
    repetitions = std::max<std::size_t>(repetitions, 3);
    std::vector<double> encode_rates, decode_rates;
    const double bits = static_cast<double>(file.size()) * 8.0;
    for (std::size_t i = 0; i < repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        const pipeline::StoragePackage pkg = pipeline::encode(file, config);
        const auto t1 = std::chrono::steady_clock::now();
        auto decoded = pipeline::decode(pkg, config);
        const auto t2 = std::chrono::steady_clock::now();
        const double enc_s = std::chrono::duration<double>(t1 - t0).count();
        const double dec_s = std::chrono::duration<double>(t2 - t1).count();
        encode_rates.push_back(bits / std::max(enc_s, 1e-9));
        decode_rates.push_back(bits / std::max(dec_s, 1e-9));
        (void)decoded;
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    return {median(encode_rates), median(decode_rates)};
}

// Machine-readable key-value rendering of a metrics report.
inline std::string report_text(const MetricsReport& r) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "gc_mean_percent = " << r.gc_mean << "\n";
    out << "gc_std_percent = " << r.gc_std << "\n";
    out << "tm_mean_c = " << r.tm_mean << "\n";
    out << "tm_std_c = " << r.tm_std << "\n";
    out << "mfe_mean_kcal_per_mol_nt = " << r.mfe_mean << "\n";
    out << "mfe_std_kcal_per_mol_nt = " << r.mfe_std << "\n";
    out << "homopolymer_max_nt = " << r.homopolymer_max << "\n";
    for (const auto& [run, count] : r.homopolymer_histogram)
        out << "homopolymer_count_run_" << run << " = " << count << "\n";
    out << "hairpin_total = " << r.hairpin_total << "\n";
    out << "net_information_density_bits_per_nt = " << r.net_information_density << "\n";
    if (r.encode_bits_per_second > 0.0)
        out << "encode_bits_per_second = " << r.encode_bits_per_second << "\n";
    if (r.decode_bits_per_second > 0.0)
        out << "decode_bits_per_second = " << r.decode_bits_per_second << "\n";
    return out.str();
}

inline std::string local_gc_csv(const MetricsReport& r) {
    std::ostringstream out;
    out.precision(6);
    out << std::fixed;
    out << "position,gc_percent\n";
    for (const auto& [pos, percent] : r.local_gc_mean) out << pos << "," << percent << "\n";
    return out.str();
}

}  // namespace dnastore::channel
