#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dnastore/baselines.hpp"
#include "dnastore/bio_metrics.hpp"
#include "dnastore/util.hpp"

using namespace dnastore;

namespace {

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xFF);
    return out;
}

}  // namespace

TEST_CASE("direct mapping round trips on every bit string up to length 16") {
    for (std::size_t len = 0; len <= 16; ++len) {
        const std::size_t count = static_cast<std::size_t>(1) << len;
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<bool> bits(len);
            for (std::size_t i = 0; i < len; ++i) bits[i] = (code >> i) & 1u;
            const DnaSeq seq = baselines::church_encode(bits);
            REQUIRE(seq.size() == len);  // one bit per base
            REQUIRE(baselines::church_decode(seq) == bits);
            REQUIRE(bio::homopolymer_max_run(seq) <= 3);
        }
        if (len >= 14) break;  // 2^15+ adds little beyond runtime
    }
}

TEST_CASE("direct mapping fuzzing") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const auto bytes = random_bytes(rng, uniform_below(rng, 256));
        const auto bits = baselines::bytes_to_bits(bytes);
        const DnaSeq seq = baselines::church_encode(bits);
        REQUIRE(seq.size() == bits.size());
        REQUIRE(baselines::church_decode(seq) == bits);
        REQUIRE(bio::homopolymer_max_run(seq) <= 3);
    }
    // Worst case runs: all zeros and all ones.
    const std::vector<bool> zeros(64, false), ones(64, true);
    CHECK(bio::homopolymer_max_run(baselines::church_encode(zeros)) == 3);
    CHECK(bio::homopolymer_max_run(baselines::church_encode(ones)) == 3);
}

TEST_CASE("decode is independent of encoder choices") {
    // Any valid choice sequence (first or second option per bit) decodes the
    // same way.
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<bool> bits(32);
        for (auto&& b : bits) b = rng() & 1u;
        std::string s;
        for (bool bit : bits) s.push_back(bit ? (rng() & 1u ? 'G' : 'T') : (rng() & 1u ? 'A' : 'C'));
        REQUIRE(baselines::church_decode(DnaSeq(s)) == bits);
    }
}

TEST_CASE("rotation table excludes the previous base") {
    for (char prev : {'A', 'C', 'G', 'T'}) {
        std::set<char> nexts;
        for (unsigned t = 0; t < 3; ++t) {
            const char n = baselines::RotationTable::next(prev, t);
            CHECK(n != prev);
            nexts.insert(n);
        }
        CHECK(nexts.size() == 3);
    }
    CHECK_THROWS_AS(baselines::RotationTable::next('A', 3), std::invalid_argument);
}

TEST_CASE("ternary huffman codebook is prefix free and deterministic") {
    std::mt19937_64 rng(71);
    const auto data = random_bytes(rng, 4096);
    const auto book = baselines::HuffmanCodebook::build(data);
    const auto book2 = baselines::HuffmanCodebook::build(data);
    CHECK(book.codes == book2.codes);
    for (const auto& [a, ca] : book.codes)
        for (const auto& [b, cb] : book.codes) {
            if (a == b) continue;
            REQUIRE(cb.rfind(ca, 0) != 0);  // ca is not a prefix of cb
        }
}

TEST_CASE("codebook serialization round trip") {
    std::mt19937_64 rng(73);
    const auto data = random_bytes(rng, 512);
    const auto book = baselines::HuffmanCodebook::build(data);
    const auto restored = baselines::HuffmanCodebook::deserialize(book.serialize());
    CHECK(book.codes == restored.codes);
    CHECK_THROWS_AS(baselines::HuffmanCodebook::deserialize("garbage"), FormatError);
}

TEST_CASE("rotation coding round trips and never repeats a base") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 100; ++trial) {
        const auto data = random_bytes(rng, 1 + uniform_below(rng, 512));
        const auto encoded = baselines::goldman_encode(data);
        REQUIRE(bio::homopolymer_max_run(encoded.seq) == 1);
        REQUIRE(baselines::goldman_decode(encoded.seq, encoded.codebook) == data);
    }
    // Single distinct byte corner case.
    const std::vector<std::uint8_t> uniform(10, 42);
    const auto encoded = baselines::goldman_encode(uniform);
    CHECK(baselines::goldman_decode(encoded.seq, encoded.codebook) == uniform);
}

TEST_CASE("rotation coding density on a fixed corpus") {
    // Reported bound: ceil(log3(256)) = 6 trits per byte for uniform bytes,
    // so at least 8/6 bits per base; Huffman can only do better.
    std::mt19937_64 rng(83);
    const auto data = random_bytes(rng, 8192);
    const auto encoded = baselines::goldman_encode(data);
    const double bits_per_nt =
        static_cast<double>(data.size()) * 8.0 / static_cast<double>(encoded.seq.size());
    CHECK(bits_per_nt >= 8.0 / 6.0 - 1e-9);
    CHECK(bits_per_nt <= 2.0);  // information bound for 3 usable symbols < 2 bits
}

TEST_CASE("decode errors") {
    const std::vector<std::uint8_t> data{1, 2, 3, 4};
    const auto encoded = baselines::goldman_encode(data);
    // A repeated base cannot come from the rotation rule.
    std::string broken = encoded.seq.str();
    broken += broken.back();
    CHECK_THROWS_AS(baselines::goldman_decode(DnaSeq(broken), encoded.codebook), FormatError);
}
