#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dnastore/channel.hpp"
#include "dnastore/util.hpp"

using namespace dnastore;

namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xFF);
    return out;
}

}  // namespace

TEST_CASE("zero rate keeps the package identical") {
    std::mt19937_64 rng(1);
    const auto pkg = pipeline::encode(random_bytes(rng, 1000), pipeline::PipelineConfig{});
    const auto noisy = channel::inject_substitutions(pkg, {.substitution_rate = 0.0, .seed = 1});
    REQUIRE(noisy.sequences.size() == pkg.sequences.size());
    for (std::size_t i = 0; i < noisy.sequences.size(); ++i)
        REQUIRE(noisy.sequences[i].seq == pkg.sequences[i].seq);
}

TEST_CASE("rate one changes every base") {
    std::mt19937_64 rng(2);
    const auto pkg = pipeline::encode(random_bytes(rng, 500), pipeline::PipelineConfig{});
    const auto noisy = channel::inject_substitutions(pkg, {.substitution_rate = 1.0, .seed = 2});
    for (std::size_t i = 0; i < noisy.sequences.size(); ++i)
        for (std::size_t j = 0; j < noisy.sequences[i].seq.size(); ++j)
            REQUIRE(noisy.sequences[i].seq[j] != pkg.sequences[i].seq[j]);
}

TEST_CASE("substitution count stays within three sigma of the binomial mean") {
    std::mt19937_64 rng(3);
    // about 10^6 nucleotides
    const auto pkg = pipeline::encode(random_bytes(rng, 192000), pipeline::PipelineConfig{});
    std::size_t total_nt = 0;
    for (const auto& r : pkg.sequences) total_nt += r.seq.size();
    REQUIRE(total_nt >= 1000000);
    const double rate = 0.01;
    const auto noisy = channel::inject_substitutions(pkg, {.substitution_rate = rate, .seed = 7});
    std::size_t substitutions = 0;
    for (std::size_t i = 0; i < noisy.sequences.size(); ++i)
        for (std::size_t j = 0; j < noisy.sequences[i].seq.size(); ++j)
            if (noisy.sequences[i].seq[j] != pkg.sequences[i].seq[j]) ++substitutions;
    const double mean = static_cast<double>(total_nt) * rate;
    const double sigma = std::sqrt(mean * (1.0 - rate));
    CHECK(std::abs(static_cast<double>(substitutions) - mean) < 3.0 * sigma);
}

TEST_CASE("injection is reproducible") {
    std::mt19937_64 rng(4);
    const auto pkg = pipeline::encode(random_bytes(rng, 3000), pipeline::PipelineConfig{});
    const channel::ChannelConfig cc{.substitution_rate = 0.05, .seed = 11};
    const auto a = channel::inject_substitutions(pkg, cc);
    const auto b = channel::inject_substitutions(pkg, cc);
    for (std::size_t i = 0; i < a.sequences.size(); ++i)
        REQUIRE(a.sequences[i].seq == b.sequences[i].seq);
}

TEST_CASE("rate validation") {
    CHECK_THROWS_AS(channel::ChannelConfig{.substitution_rate = -0.1}.validate(),
                    std::invalid_argument);
    CHECK_THROWS_AS(channel::ChannelConfig{.substitution_rate = 1.5}.validate(),
                    std::invalid_argument);
}

TEST_CASE("noiseless round trip reports perfect reconstruction") {
    std::mt19937_64 rng(5);
    const auto data = random_bytes(rng, 4000);
    const auto report = channel::evaluate_roundtrip(data, pipeline::PipelineConfig{},
                                                    {.substitution_rate = 0.0, .seed = 1});
    CHECK(report.reconstruction_rate == 1.0);
    CHECK(report.block_failure_rate == 0.0);
}

TEST_CASE("per row corruption within capacity still reconstructs") {
    // Adversarial placement: exactly t = 8 corrupted symbols in every row.
    std::mt19937_64 rng(6);
    const auto data = random_bytes(rng, 3000);
    pipeline::PipelineConfig cfg;
    auto pkg = pipeline::encode(data, cfg);
    for (auto& rec : pkg.sequences) {
        std::string s = rec.seq.str();
        std::set<std::size_t> bytes;
        while (bytes.size() < 8) bytes.insert(uniform_below(rng, 64));
        for (std::size_t byte : bytes) {
            const std::size_t nt = byte * 4 + uniform_below(rng, 4);
            const int idx = base_index(s[nt]);
            s[nt] = kBases[(idx + 1 + static_cast<int>(uniform_below(rng, 3))) % 4];
        }
        rec.seq = DnaSeq(s);
    }
    auto [decoded, report] = pipeline::decode(pkg, cfg);
    REQUIRE(decoded == data);
    CHECK(report.all_corrected());
}

TEST_CASE("corrupting t+1 symbols in one row flags exactly that block") {
    std::mt19937_64 rng(7);
    const auto data = random_bytes(rng, 48 * 32 * 3);  // 3 blocks
    pipeline::PipelineConfig cfg;
    auto pkg = pipeline::encode(data, cfg);
    // Hit 9 distinct symbols of block 1, row 4 with changes in each byte.
    for (auto& rec : pkg.sequences) {
        if (rec.block != 1 || rec.row != 4) continue;
        std::string s = rec.seq.str();
        for (std::size_t byte = 0; byte < 9; ++byte) {
            const std::size_t nt = byte * 4;
            const int idx = base_index(s[nt]);
            s[nt] = kBases[(idx + 1) % 4];
        }
        rec.seq = DnaSeq(s);
    }
    auto [decoded, report] = pipeline::decode(pkg, cfg);
    CHECK(report.uncorrectable_rows >= 1);
    std::vector<char> failed(3, 0);
    for (const auto& row : report.rows)
        if (row.status == rs::DecodeStatus::uncorrectable) failed[row.block] = 1;
    CHECK(failed[1] == 1);
    CHECK(failed[0] == 0);
    CHECK(failed[2] == 0);
}

TEST_CASE("block failure rate is monotone in the substitution rate in expectation") {
    std::mt19937_64 rng(8);
    const auto data = random_bytes(rng, 48 * 32 * 4);
    pipeline::PipelineConfig cfg;
    double previous = -1.0;
    std::size_t increases = 0, comparisons = 0;
    for (const double rate : {0.0, 0.005, 0.02, 0.06, 0.15}) {
        const auto report =
            channel::evaluate_roundtrip(data, cfg, {.substitution_rate = rate, .seed = 99});
        if (previous >= 0.0) {
            ++comparisons;
            if (report.block_failure_rate + 1e-12 >= previous) ++increases;
        }
        previous = report.block_failure_rate;
    }
    // Single-step noise is allowed; the sweep must be predominantly rising.
    CHECK(comparisons - increases <= 1);
}

TEST_CASE("metrics report on a hand-built package") {
    // Two sequences with hand-computable statistics.
    pipeline::StoragePackage pkg;
    pkg.header.original_length = 4;  // 32 bits over 16 nt -> density 2.0
    pkg.header.block_count = 1;
    pkg.header.rows_per_block = 2;
    pkg.sequences.push_back({0, 0, DnaSeq("GCGCGCGC")});
    pkg.sequences.push_back({0, 1, DnaSeq("ATATATAT")});

    const auto& table = thermo::NnParameterTable::unified();
    thermo::ThermoConfig tcfg;
    const bio::HairpinParams hp{.s_min = 2, .r_min = 3};
    const auto report = channel::metrics_report(pkg, table, tcfg, hp, 4, 2);

    CHECK(report.gc_mean == Catch::Approx(50.0));
    CHECK(report.gc_std == Catch::Approx(50.0));
    const double tm_a = thermo::melting_temperature(DnaSeq("GCGCGCGC"), table, tcfg);
    const double tm_b = thermo::melting_temperature(DnaSeq("ATATATAT"), table, tcfg);
    CHECK(report.tm_mean == Catch::Approx((tm_a + tm_b) / 2.0));
    CHECK(report.tm_std == Catch::Approx(std::abs(tm_a - tm_b) / 2.0));
    const double mfe_a = thermo::mfe(DnaSeq("GCGCGCGC"), DnaSeq("GCGCGCGC"), table, tcfg) / 8.0;
    const double mfe_b = thermo::mfe(DnaSeq("ATATATAT"), DnaSeq("ATATATAT"), table, tcfg) / 8.0;
    CHECK(report.mfe_mean == Catch::Approx((mfe_a + mfe_b) / 2.0));
    CHECK(report.homopolymer_max == 1);
    CHECK(report.hairpin_total ==
          Catch::Approx(bio::hairpin_count(DnaSeq("GCGCGCGC"), hp) +
                        bio::hairpin_count(DnaSeq("ATATATAT"), hp)));
    CHECK(report.net_information_density == Catch::Approx(2.0));
    // Window 4 step 2 on 8 nt: starts 0, 2, 4; averaged across both rows.
    REQUIRE(report.local_gc_mean.size() == 3);
    for (const auto& [pos, percent] : report.local_gc_mean) CHECK(percent == Catch::Approx(50.0));

    pipeline::StoragePackage empty;
    CHECK_THROWS_AS(channel::metrics_report(empty, table, tcfg, hp, 4), std::domain_error);
}

TEST_CASE("identical sequences give zero standard deviations") {
    pipeline::StoragePackage pkg;
    pkg.header.original_length = 10;
    pkg.sequences.push_back({0, 0, DnaSeq("ACGTACGTGC")});
    pkg.sequences.push_back({0, 1, DnaSeq("ACGTACGTGC")});
    const auto report = channel::metrics_report(pkg, thermo::NnParameterTable::unified(), {},
                                                {.s_min = 2, .r_min = 3}, 5);
    CHECK(report.gc_std == Catch::Approx(0.0).margin(1e-12));
    CHECK(report.tm_std == Catch::Approx(0.0).margin(1e-12));
    CHECK(report.mfe_std == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("throughput measurement sanity") {
    std::mt19937_64 rng(10);
    const auto data = random_bytes(rng, 48 * 32);
    const auto [enc_a, dec_a] = channel::measure_throughput(data, pipeline::PipelineConfig{});
    const auto [enc_b, dec_b] = channel::measure_throughput(data, pipeline::PipelineConfig{});
    CHECK(enc_a > 0.0);
    CHECK(dec_a > 0.0);
    // Stability smoke test: medians within 50 percent of each other.
    CHECK(std::abs(enc_a - enc_b) / std::max(enc_a, enc_b) < 0.5);
    CHECK(std::abs(dec_a - dec_b) / std::max(dec_a, dec_b) < 0.5);
}

TEST_CASE("report rendering is machine readable") {
    pipeline::StoragePackage pkg;
    pkg.header.original_length = 8;
    pkg.sequences.push_back({0, 0, DnaSeq("ACGTACGTACGTACGT")});
    const auto report = channel::metrics_report(pkg, thermo::NnParameterTable::unified(), {},
                                                {.s_min = 2, .r_min = 3}, 8);
    const std::string text = channel::report_text(report);
    CHECK(text.find("gc_mean_percent = ") != std::string::npos);
    CHECK(text.find("net_information_density_bits_per_nt = ") != std::string::npos);
    const std::string csv = channel::local_gc_csv(report);
    CHECK(csv.rfind("position,gc_percent\n", 0) == 0);
}
