#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dnastore/base_map.hpp"
#include "dnastore/bio_metrics.hpp"
#include "dnastore/util.hpp"

using namespace dnastore;

TEST_CASE("published table entries") {
    auto entry = [](unsigned n) {
        const auto d = base_map::nibble_to_dinucleotide(n);
        return std::string{d[0], d[1]};
    };
    CHECK(entry(0b0000) == "AT");
    CHECK(entry(0b1111) == "CG");
    CHECK(entry(0b1001) == "GA");
    // Full 16-entry table, row = first two bits, column = last two bits.
    const char* expected[16] = {"AT", "AG", "AC", "AA", "TA", "TC", "TG", "TT",
                                "GG", "GA", "GT", "GC", "CC", "CT", "CA", "CG"};
    for (unsigned n = 0; n < 16; ++n) CHECK(entry(n) == expected[n]);
}

TEST_CASE("the 16 entries enumerate all dinucleotides once") {
    std::set<std::string> seen;
    for (unsigned n = 0; n < 16; ++n) {
        const auto d = base_map::nibble_to_dinucleotide(n);
        seen.insert(std::string{d[0], d[1]});
    }
    CHECK(seen.size() == 16);
}

TEST_CASE("inverse lookup") {
    CHECK(base_map::dinucleotide_to_nibble('A', 'T') == 0);
    for (unsigned n = 0; n < 16; ++n) {
        const auto d = base_map::nibble_to_dinucleotide(n);
        CHECK(base_map::dinucleotide_to_nibble(d[0], d[1]) == n);
    }
    CHECK_THROWS_AS(base_map::dinucleotide_to_nibble('A', 'U'), FormatError);
    CHECK_THROWS_AS(base_map::dinucleotide_to_nibble(DnaSeq("ACG")), FormatError);
}

TEST_CASE("byte transcoding") {
    CHECK(base_map::bytes_to_dna({}).empty());
    const std::uint8_t single[] = {0x0F};
    CHECK(base_map::bytes_to_dna(single).str() == "ATCG");  // high nibble 0x0, low 0xF
    CHECK(base_map::dna_to_bytes(DnaSeq("ATCG")) == std::vector<std::uint8_t>{0x0F});
    CHECK(base_map::dna_to_bytes(DnaSeq("")).empty());
    CHECK_THROWS_AS(base_map::dna_to_bytes(DnaSeq("ATC")), FormatError);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::uint8_t> data(uniform_below(rng, 200));
        for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 0xFF);
        const DnaSeq seq = base_map::bytes_to_dna(data);
        REQUIRE(seq.size() == data.size() * 4);
        REQUIRE(base_map::dna_to_bytes(seq) == data);
    }
}

TEST_CASE("complement utilities") {
    CHECK(complement('A') == 'T');
    CHECK(complement('G') == 'C');
    CHECK_THROWS_AS(complement('X'), FormatError);
    CHECK(reverse_complement(DnaSeq("GCGC")) == DnaSeq("GCGC"));
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        std::string s;
        for (std::size_t i = uniform_below(rng, 64); i-- > 0;) s.push_back(kBases[rng() & 3]);
        const DnaSeq seq(s);
        CHECK(reverse_complement(reverse_complement(seq)) == seq);
    }
}

TEST_CASE("uniform input transcodes to about 50 percent GC") {
    std::mt19937_64 rng(99);
    std::size_t gc = 0, total = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto d = base_map::nibble_to_dinucleotide(static_cast<unsigned>(rng() & 0xF));
        for (char c : d) {
            if (c == 'G' || c == 'C') ++gc;
            ++total;
        }
    }
    const double percent = 100.0 * static_cast<double>(gc) / static_cast<double>(total);
    CHECK(percent > 49.0);
    CHECK(percent < 51.0);
}

TEST_CASE("no block contains a run longer than 2; cross-block runs can grow") {
    for (unsigned n = 0; n < 16; ++n) {
        const DnaSeq block = base_map::bytes_to_dna(std::vector<std::uint8_t>{
            static_cast<std::uint8_t>(n << 4 | n)});
        CHECK(bio::homopolymer_max_run(block) <= 2 + 2);  // two equal blocks: run <= 4
        const auto d = base_map::nibble_to_dinucleotide(n);
        const DnaSeq single(std::string{d[0], d[1]});
        CHECK(bio::homopolymer_max_run(single) <= 2);
    }
    // Repeated nibble 0b0011 (AA) yields an unbounded run across blocks.
    const std::vector<std::uint8_t> pathological(8, 0x33);
    CHECK(bio::homopolymer_max_run(base_map::bytes_to_dna(pathological)) == 32);
}
