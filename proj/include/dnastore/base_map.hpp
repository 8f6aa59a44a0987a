// Block transcoding between 4-bit groups and dinucleotides. A nibble's high
// bit pair selects the table row, the low pair the column; every one of the
// 16 dinucleotides appears exactly once, so the map is a bijection and no
// single block contains a homopolymer longer than 2.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dnastore/dna.hpp"
#include "dnastore/errors.hpp"

namespace dnastore::base_map {

// Row-major: index = nibble value, rows 00,01,10,11 top to bottom.
inline constexpr std::array<std::array<char, 2>, 16> kNibbleToDinuc = {{
    {'A', 'T'}, {'A', 'G'}, {'A', 'C'}, {'A', 'A'},  // 00xx
    {'T', 'A'}, {'T', 'C'}, {'T', 'G'}, {'T', 'T'},  // 01xx
    {'G', 'G'}, {'G', 'A'}, {'G', 'T'}, {'G', 'C'},  // 10xx
    {'C', 'C'}, {'C', 'T'}, {'C', 'A'}, {'C', 'G'},  // 11xx
}};

namespace detail {
constexpr std::array<std::uint8_t, 16> build_inverse() {
    std::array<std::uint8_t, 16> inv{};
    for (auto& v : inv) v = 0xFF;
    for (std::uint8_t n = 0; n < 16; ++n) {
        int a = 0, b = 0;
        const char c0 = kNibbleToDinuc[n][0], c1 = kNibbleToDinuc[n][1];
        a = c0 == 'A' ? 0 : c0 == 'C' ? 1 : c0 == 'G' ? 2 : 3;
        b = c1 == 'A' ? 0 : c1 == 'C' ? 1 : c1 == 'G' ? 2 : 3;
        inv[static_cast<std::size_t>(a * 4 + b)] = n;
    }
    return inv;
}
inline constexpr std::array<std::uint8_t, 16> kInverse = build_inverse();
}  // namespace detail

inline std::array<char, 2> nibble_to_dinucleotide(unsigned nibble) {
    if (nibble > 15) throw std::invalid_argument("nibble out of range");
    return kNibbleToDinuc[nibble];
}

inline std::uint8_t dinucleotide_to_nibble(char first, char second) {
    const int a = base_index(first);
    const int b = base_index(second);
    return detail::kInverse[static_cast<std::size_t>(a * 4 + b)];
}

inline std::uint8_t dinucleotide_to_nibble(const DnaSeq& d) {
    if (d.size() != 2) throw FormatError("dinucleotide must have length 2");
    return dinucleotide_to_nibble(d[0], d[1]);
}

// High nibble first: one byte becomes four bases.
inline DnaSeq bytes_to_dna(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve(data.size() * 4);
    for (std::uint8_t byte : data) {
        const auto& hi = kNibbleToDinuc[byte >> 4];
        const auto& lo = kNibbleToDinuc[byte & 0x0F];
        out.push_back(hi[0]);
        out.push_back(hi[1]);
        out.push_back(lo[0]);
        out.push_back(lo[1]);
    }
    return DnaSeq::unchecked(std::move(out));
}

inline std::vector<std::uint8_t> dna_to_bytes(const DnaSeq& seq) {
    if (seq.size() % 4 != 0) throw FormatError("sequence length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(seq.size() / 4);
    for (std::size_t i = 0; i < seq.size(); i += 4) {
        const std::uint8_t hi = dinucleotide_to_nibble(seq[i], seq[i + 1]);
        const std::uint8_t lo = dinucleotide_to_nibble(seq[i + 2], seq[i + 3]);
        out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return out;
}

// G/C count of a dinucleotide block, used by the soft GC objective.
inline int gc_count_of_nibble(unsigned nibble) {
    const auto& d = kNibbleToDinuc[nibble & 0x0F];
    int c = 0;
    if (d[0] == 'G' || d[0] == 'C') ++c;
    if (d[1] == 'G' || d[1] == 'C') ++c;
    return c;
}

}  // namespace dnastore::base_map
