// Validated DNA sequences over {A, C, G, T} and complement utilities.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "dnastore/errors.hpp"

namespace dnastore {

inline bool is_base(char c) { return c == 'A' || c == 'C' || c == 'G' || c == 'T'; }

inline char complement(char base) {
    switch (base) {
        case 'A': return 'T';
        case 'T': return 'A';
        case 'G': return 'C';
        case 'C': return 'G';
        default: throw FormatError(std::string("invalid base: '") + base + "'");
    }
}

// Index in alphabetical order A=0, C=1, G=2, T=3.
inline int base_index(char base) {
    switch (base) {
        case 'A': return 0;
        case 'C': return 1;
        case 'G': return 2;
        case 'T': return 3;
        default: throw FormatError(std::string("invalid base: '") + base + "'");
    }
}

inline constexpr char kBases[4] = {'A', 'C', 'G', 'T'};

class DnaSeq {
public:
    DnaSeq() = default;

    explicit DnaSeq(std::string bases) : bases_(std::move(bases)) {
        for (char c : bases_)
            if (!is_base(c)) throw FormatError(std::string("invalid base: '") + c + "'");
    }

    // Callers that construct from already-validated bases (hot paths).
    static DnaSeq unchecked(std::string bases) {
        DnaSeq s;
        s.bases_ = std::move(bases);
        return s;
    }

    std::size_t size() const { return bases_.size(); }
    bool empty() const { return bases_.empty(); }
    char operator[](std::size_t i) const { return bases_[i]; }
    const std::string& str() const { return bases_; }

    auto begin() const { return bases_.begin(); }
    auto end() const { return bases_.end(); }

    void append(char base) {
        if (!is_base(base)) throw FormatError(std::string("invalid base: '") + base + "'");
        bases_.push_back(base);
    }

    friend bool operator==(const DnaSeq&, const DnaSeq&) = default;

private:
    std::string bases_;
};

inline DnaSeq reverse_complement(const DnaSeq& seq) {
    std::string out;
    out.reserve(seq.size());
    for (std::size_t i = seq.size(); i-- > 0;) out.push_back(complement(seq[i]));
    return DnaSeq::unchecked(std::move(out));
}

}  // namespace dnastore
