// Sequence-level constraint analyzers: global and windowed GC content,
// homopolymer runs, and the stem/loop hairpin counter.
//
// The hairpin counter is a weighted count: every (stem length s, ring length
// r, start i) geometry whose stem match count m exceeds s * threshold_ratio
// contributes m, not 1. Geometry enumeration follows the triple-sum limits
//   s in [s_min, (L - r_min)/2], r in [r_min, L - 2s], i in [1, L - 2s - r]
// with 1-based indices; pair j of a geometry couples positions (s+i-j) and
// (s+i+r+j-1). Only in-range geometries are visited.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dnastore/dna.hpp"

namespace dnastore::bio {

struct HairpinParams {
    std::size_t s_min = 3;         // minimum stem length (nt)
    std::size_t r_min = 3;         // minimum ring length (nt)
    double threshold_ratio = 0.5;  // fraction of the stem that must pair

    void validate() const {
        if (s_min < 1 || r_min < 1) throw std::invalid_argument("hairpin: s_min and r_min must be >= 1");
        if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
            throw std::invalid_argument("hairpin: threshold_ratio must lie in (0, 1)");
    }
};

struct GcProfile {
    double global_percent = 0.0;
    std::vector<std::pair<std::size_t, double>> window_series;  // (start index, percent)
};

inline double gc_content(const DnaSeq& seq) {
    if (seq.empty()) throw std::domain_error("gc_content: empty sequence");
    std::size_t gc = 0;
    for (char c : seq)
        if (c == 'G' || c == 'C') ++gc;
    return 100.0 * static_cast<double>(gc) / static_cast<double>(seq.size());
}

// Windowed GC at the given stride; a final partial window is dropped.
inline GcProfile local_gc(const DnaSeq& seq, std::size_t window, std::size_t step = 1) {
    if (window < 1 || window > seq.size()) throw std::domain_error("local_gc: window out of range");
    if (step < 1) throw std::invalid_argument("local_gc: step must be >= 1");
    GcProfile profile;
    profile.global_percent = gc_content(seq);
    for (std::size_t start = 0; start + window <= seq.size(); start += step) {
        std::size_t gc = 0;
        for (std::size_t i = start; i < start + window; ++i)
            if (seq[i] == 'G' || seq[i] == 'C') ++gc;
        profile.window_series.emplace_back(start, 100.0 * static_cast<double>(gc) /
                                                      static_cast<double>(window));
    }
    return profile;
}

inline std::size_t homopolymer_max_run(const DnaSeq& seq) {
    std::size_t best = 0, run = 0;
    char prev = '\0';
    for (char c : seq) {
        run = (c == prev) ? run + 1 : 1;
        prev = c;
        if (run > best) best = run;
    }
    return best;
}

// 1 iff the bases are Watson-Crick complementary.
inline int bp(char a, char b) {
    return ((a == 'A' && b == 'T') || (a == 'T' && b == 'A') || (a == 'G' && b == 'C') ||
            (a == 'C' && b == 'G'))
               ? 1
               : 0;
}

// Weighted hairpin count. Iterates innermost-pair anchors (a, b) and grows
// the stem outward, which visits each (s, r, i) geometry once in O(1).
inline double hairpin_count(const DnaSeq& seq, const HairpinParams& params = {}) {
    params.validate();
    const std::size_t len = seq.size();
    if (len < 2 * params.s_min + params.r_min) return 0.0;
    double total = 0.0;
    // 0-based anchors: a = innermost left stem base, b = innermost right stem
    // base, ring length r = b - a - 1. For stem length s the outermost pair
    // sits at (a-s+1, b+s-1); the i-sum upper limit keeps b+s-1 <= L-2.
    for (std::size_t a = 0; a + 1 < len; ++a) {
        for (std::size_t b = a + params.r_min + 1; b + 1 < len; ++b) {
            const std::size_t s_max = std::min(a + 1, len - 1 - b);
            if (s_max < params.s_min) continue;
            int matches = 0;
            for (std::size_t d = 0; d < s_max; ++d) {
                matches += bp(seq[a - d], seq[b + d]);
                const std::size_t s = d + 1;
                if (s >= params.s_min &&
                    static_cast<double>(matches) > static_cast<double>(s) * params.threshold_ratio)
                    total += static_cast<double>(matches);
            }
        }
    }
    return total;
}

}  // namespace dnastore::bio
