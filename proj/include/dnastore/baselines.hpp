// Reference transcoders used for density and constraint comparison: the
// direct one-bit-per-base mapping and ternary-Huffman rotation coding. Only
// the transcoding cores are implemented; fragment redundancy and indexing
// schemes are out of scope.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "dnastore/dna.hpp"
#include "dnastore/errors.hpp"

namespace dnastore::baselines {

// --- direct mapping ---------------------------------------------------------
// 0 -> A or C, 1 -> G or T. The first option is taken unless it would create
// a homopolymer run of 4; decode ignores which option was chosen, so any
// valid encoder choice sequence decodes identically.

inline DnaSeq church_encode(const std::vector<bool>& bits) {
    std::string out;
    out.reserve(bits.size());
    char prev = '\0';
    std::size_t run = 0;
    for (bool bit : bits) {
        const char first = bit ? 'G' : 'A';
        const char second = bit ? 'T' : 'C';
        char next = first;
        if (first == prev && run >= 3) next = second;
        out.push_back(next);
        run = next == prev ? run + 1 : 1;
        prev = next;
    }
    return DnaSeq::unchecked(std::move(out));
}

inline std::vector<bool> church_decode(const DnaSeq& seq) {
    std::vector<bool> bits;
    bits.reserve(seq.size());
    for (char c : seq) {
        switch (c) {
            case 'A':
            case 'C': bits.push_back(false); break;
            case 'G':
            case 'T': bits.push_back(true); break;
            default: throw FormatError(std::string("church: invalid base '") + c + "'");
        }
    }
    return bits;
}

inline std::vector<bool> bytes_to_bits(std::span<const std::uint8_t> bytes) {
    std::vector<bool> bits;
    bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1u);
    return bits;
}

// --- ternary Huffman with rotation mapping -----------------------------------

// (previous base, trit) -> next base; the three candidates exclude the
// previous base, which structurally forbids homopolymers.
struct RotationTable {
    static char next(char prev, unsigned trit) {
        if (trit > 2) throw std::invalid_argument("rotation: trit out of range");
        static constexpr std::array<std::array<char, 3>, 4> table = {{
            {'C', 'G', 'T'},  // after A
            {'G', 'T', 'A'},  // after C
            {'T', 'A', 'C'},  // after G
            {'A', 'C', 'G'},  // after T
        }};
        return table[static_cast<std::size_t>(base_index(prev))][trit];
    }

    static unsigned trit(char prev, char current) {
        for (unsigned t = 0; t < 3; ++t)
            if (next(prev, t) == current) return t;
        throw FormatError(std::string("rotation: base '") + current + "' repeats '" + prev + "'");
    }
};

inline constexpr char kRotationInitialBase = 'A';

struct HuffmanCodebook {
    std::map<std::uint8_t, std::string> codes;  // byte -> trit string over {'0','1','2'}

    // Built from byte frequencies; ties are broken by symbol value so the
    // codebook is deterministic.
    static HuffmanCodebook build(std::span<const std::uint8_t> data) {
        if (data.empty()) throw std::invalid_argument("huffman: empty input");
        std::array<std::size_t, 256> freq{};
        for (std::uint8_t b : data) ++freq[b];

        struct Node {
            std::size_t weight;
            std::size_t order;  // creation order, for deterministic ties
            int symbol;         // -1 for internal
            std::array<int, 3> children{-1, -1, -1};
        };
        std::vector<Node> nodes;
        auto cmp = [&](int a, int b) {
            if (nodes[static_cast<std::size_t>(a)].weight != nodes[static_cast<std::size_t>(b)].weight)
                return nodes[static_cast<std::size_t>(a)].weight > nodes[static_cast<std::size_t>(b)].weight;
            return nodes[static_cast<std::size_t>(a)].order > nodes[static_cast<std::size_t>(b)].order;
        };
        std::priority_queue<int, std::vector<int>, decltype(cmp)> heap(cmp);
        for (int s = 0; s < 256; ++s) {
            if (freq[static_cast<std::size_t>(s)] == 0) continue;
            nodes.push_back({freq[static_cast<std::size_t>(s)], nodes.size(), s, {}});
            heap.push(static_cast<int>(nodes.size()) - 1);
        }
        // A full ternary tree needs leaves == 1 (mod 2); pad with dummies.
        while (heap.size() > 1 && (heap.size() - 1) % 2 != 0) {
            nodes.push_back({0, nodes.size(), -2, {}});  // dummy, never coded
            heap.push(static_cast<int>(nodes.size()) - 1);
        }
        while (heap.size() > 1) {
            Node merged{0, nodes.size(), -1, {-1, -1, -1}};
            for (int c = 0; c < 3 && !heap.empty(); ++c) {
                merged.children[static_cast<std::size_t>(c)] = heap.top();
                merged.weight += nodes[static_cast<std::size_t>(heap.top())].weight;
                heap.pop();
            }
            nodes.push_back(merged);
            heap.push(static_cast<int>(nodes.size()) - 1);
        }

        HuffmanCodebook book;
        if (nodes.size() == 1 && nodes[0].symbol >= 0) {
            // Single distinct byte: give it a one-trit code.
            book.codes[static_cast<std::uint8_t>(nodes[0].symbol)] = "0";
            return book;
        }
        std::string prefix;
        auto walk = [&](auto&& self, int idx) -> void {
            const Node& node = nodes[static_cast<std::size_t>(idx)];
            if (node.symbol >= 0) {
                book.codes[static_cast<std::uint8_t>(node.symbol)] = prefix;
                return;
            }
            if (node.symbol == -2) return;  // dummy
            for (unsigned t = 0; t < 3; ++t) {
                if (node.children[t] < 0) continue;
                prefix.push_back(static_cast<char>('0' + t));
                self(self, node.children[t]);
                prefix.pop_back();
            }
        };
        walk(walk, static_cast<int>(nodes.size()) - 1);
        return book;
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [byte, code] : codes)
            out += std::to_string(byte) + "\t" + code + "\n";
        return out;
    }

    static HuffmanCodebook deserialize(const std::string& text) {
        HuffmanCodebook book;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw FormatError("codebook: malformed line: " + line);
            const unsigned long value = std::stoul(line.substr(0, tab));
            if (value > 255) throw FormatError("codebook: byte value out of range");
            const std::string code = line.substr(tab + 1);
            for (char c : code)
                if (c < '0' || c > '2') throw FormatError("codebook: invalid trit: " + code);
            book.codes[static_cast<std::uint8_t>(value)] = code;
        }
        if (book.codes.empty()) throw FormatError("codebook: empty");
        return book;
    }
};

struct GoldmanEncoded {
    DnaSeq seq;
    HuffmanCodebook codebook;
};

inline GoldmanEncoded goldman_encode(std::span<const std::uint8_t> bytes) {
    GoldmanEncoded out;
    out.codebook = HuffmanCodebook::build(bytes);
    std::string seq;
    char prev = kRotationInitialBase;
    for (std::uint8_t b : bytes) {
        const std::string& code = out.codebook.codes.at(b);
        for (char trit : code) {
            const char next = RotationTable::next(prev, static_cast<unsigned>(trit - '0'));
            seq.push_back(next);
            prev = next;
        }
    }
    out.seq = DnaSeq::unchecked(std::move(seq));
    return out;
}

inline std::vector<std::uint8_t> goldman_decode(const DnaSeq& seq, const HuffmanCodebook& book) {
    // Invert the rotation walk, then prefix-decode the trit stream.
    std::string trits;
    trits.reserve(seq.size());
    char prev = kRotationInitialBase;
    for (char c : seq) {
        trits.push_back(static_cast<char>('0' + RotationTable::trit(prev, c)));
        prev = c;
    }
    std::map<std::string, std::uint8_t> inverse;
    for (const auto& [byte, code] : book.codes) inverse[code] = byte;

    std::vector<std::uint8_t> out;
    std::string pending;
    for (char t : trits) {
        pending.push_back(t);
        const auto it = inverse.find(pending);
        if (it != inverse.end()) {
            out.push_back(it->second);
            pending.clear();
        }
    }
    if (!pending.empty()) throw FormatError("goldman: trailing trits do not form a codeword");
    return out;
}

}  // namespace dnastore::baselines
