// Thermodynamic evaluation: nearest-neighbor melting temperature and a
// gapless-duplex free-energy approximation.
//
// Duplex dG here is the minimum over all relative offsets of a gapless
// antiparallel alignment; each maximal run of >= 2 aligned complementary
// pairs contributes its stack steps at dG = dH - T*dS/1000. There is no
// initiation term, no loop model and no mismatch model, so absolute values
// are not comparable with full folding engines; only ordering and sign are
// meaningful.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "dnastore/bio_metrics.hpp"
#include "dnastore/dna.hpp"
#include "dnastore/errors.hpp"

namespace dnastore::thermo {

struct NnParameterTable {
    // Indexed by base_index(first) * 4 + base_index(second).
    std::array<double, 16> stack_dh{};
    std::array<double, 16> stack_ds{};
    double init_gc_dh = 0.0, init_gc_ds = 0.0;  // per terminal G.C pair
    double init_at_dh = 0.0, init_at_ds = 0.0;  // per terminal A.T pair
    double symmetry_dh = 0.0, symmetry_ds = 0.0;

    static std::size_t step_index(char first, char second) {
        return static_cast<std::size_t>(base_index(first) * 4 + base_index(second));
    }

    // Every stack step must carry the same parameters as its reverse
    // complement; that degeneracy is what makes Tm strand-direction free.
    void validate() const {
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const char f = kBases[a], s = kBases[b];
                const std::size_t i = step_index(f, s);
                const std::size_t j = step_index(complement(s), complement(f));
                if (stack_dh[i] != stack_dh[j] || stack_ds[i] != stack_ds[j])
                    throw FormatError(std::string("nn table: step ") + f + s +
                                      " disagrees with its reverse complement");
                if (stack_dh[i] == 0.0 && stack_ds[i] == 0.0)
                    throw FormatError(std::string("nn table: missing stack step ") + f + s);
            }
        }
    }

    static NnParameterTable parse(std::istream& in);
    static NnParameterTable from_file(const std::string& path);
    static const NnParameterTable& unified();  // built-in copy of the shipped file
};

inline NnParameterTable NnParameterTable::parse(std::istream& in) {
    NnParameterTable t;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string tag;
        if (!(fields >> tag)) continue;
        if (tag == "stack") {
            std::string step;
            double dh = 0, ds = 0;
            if (!(fields >> step >> dh >> ds) || step.size() != 2)
                throw FormatError("nn table: malformed stack line: " + line);
            const std::size_t i = step_index(step[0], step[1]);
            t.stack_dh[i] = dh;
            t.stack_ds[i] = ds;
        } else if (tag == "init_terminal_gc") {
            if (!(fields >> t.init_gc_dh >> t.init_gc_ds))
                throw FormatError("nn table: malformed init_terminal_gc line");
        } else if (tag == "init_terminal_at") {
            if (!(fields >> t.init_at_dh >> t.init_at_ds))
                throw FormatError("nn table: malformed init_terminal_at line");
        } else if (tag == "symmetry_correction") {
            if (!(fields >> t.symmetry_dh >> t.symmetry_ds))
                throw FormatError("nn table: malformed symmetry_correction line");
        } else {
            throw FormatError("nn table: unknown line tag: " + tag);
        }
    }
    t.validate();
    return t;
}

inline NnParameterTable NnParameterTable::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open nn parameter file: " + path);
    return parse(in);
}

inline const NnParameterTable& NnParameterTable::unified() {
    static const NnParameterTable table = [] {
        NnParameterTable t;
        struct Entry {
            const char* step;
            double dh, ds;
        };
        // Transcribed from the unified oligonucleotide parameter set; must
        // stay byte-equivalent to data/nn_params_unified.txt.
        static constexpr Entry entries[] = {
            {"AA", -7.9, -22.2}, {"AC", -8.4, -22.4}, {"AG", -7.8, -21.0}, {"AT", -7.2, -20.4},
            {"CA", -8.5, -22.7}, {"CC", -8.0, -19.9}, {"CG", -10.6, -27.2}, {"CT", -7.8, -21.0},
            {"GA", -8.2, -22.2}, {"GC", -9.8, -24.4}, {"GG", -8.0, -19.9}, {"GT", -8.4, -22.4},
            {"TA", -7.2, -21.3}, {"TC", -8.2, -22.2}, {"TG", -8.5, -22.7}, {"TT", -7.9, -22.2},
        };
        for (const auto& e : entries) {
            const std::size_t i = step_index(e.step[0], e.step[1]);
            t.stack_dh[i] = e.dh;
            t.stack_ds[i] = e.ds;
        }
        t.init_gc_dh = 0.1;
        t.init_gc_ds = -2.8;
        t.init_at_dh = 2.3;
        t.init_at_ds = 4.1;
        t.symmetry_dh = 0.0;
        t.symmetry_ds = -1.4;
        t.validate();
        return t;
    }();
    return table;
}

struct ThermoConfig {
    double gas_constant = 1.987;            // cal/(K*mol)
    double strand_concentration = 1e-4;     // C_T, mol/L
    double concentration_divisor = 1.0;     // some conventions use C_T/4
    double evaluation_temperature = 310.15; // K, for dG estimates

    void validate() const {
        if (strand_concentration <= 0.0)
            throw std::invalid_argument("thermo: strand concentration must be positive");
        if (concentration_divisor <= 0.0)
            throw std::invalid_argument("thermo: concentration divisor must be positive");
    }
};

// Stack sum over consecutive steps plus initiation for both termini, plus the
// symmetry correction for self-reverse-complementary sequences.
// Returns (dH kcal/mol, dS cal/(K*mol)).
inline std::pair<double, double> duplex_enthalpy_entropy(const DnaSeq& seq,
                                                         const NnParameterTable& table) {
    if (seq.size() < 2) throw std::domain_error("duplex parameters need length >= 2");
    double dh = 0.0, ds = 0.0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        const std::size_t idx = NnParameterTable::step_index(seq[i], seq[i + 1]);
        dh += table.stack_dh[idx];
        ds += table.stack_ds[idx];
    }
    for (char terminal : {seq[0], seq[seq.size() - 1]}) {
        if (terminal == 'G' || terminal == 'C') {
            dh += table.init_gc_dh;
            ds += table.init_gc_ds;
        } else {
            dh += table.init_at_dh;
            ds += table.init_at_ds;
        }
    }
    if (seq == reverse_complement(seq)) {
        dh += table.symmetry_dh;
        ds += table.symmetry_ds;
    }
    return {dh, ds};
}

// Tm = dH / (dS + R ln(C_T / divisor)) - 273.15, in degrees C.
inline double melting_temperature(const DnaSeq& seq, const NnParameterTable& table,
                                  const ThermoConfig& config) {
    config.validate();
    const auto [dh, ds] = duplex_enthalpy_entropy(seq, table);
    const double denom =
        ds + config.gas_constant * std::log(config.strand_concentration / config.concentration_divisor);
    if (denom == 0.0) throw std::domain_error("melting_temperature: degenerate denominator");
    return dh * 1000.0 / denom - 273.15;
}

namespace detail {

// dG of one offset of the gapless alignment of u against reverse(v'):
// u[i] pairs with v[v.size()-1-(i-offset)].
inline double offset_dg(const DnaSeq& u, const DnaSeq& v, int offset,
                        const NnParameterTable& table, double temperature_k) {
    double dg = 0.0;
    int run = 0;
    const int nu = static_cast<int>(u.size());
    const int nv = static_cast<int>(v.size());
    for (int i = std::max(0, offset); i < std::min(nu, offset + nv); ++i) {
        const int j = nv - 1 - (i - offset);
        const bool paired = bio::bp(u[static_cast<std::size_t>(i)],
                                    v[static_cast<std::size_t>(j)]) != 0;
        if (!paired) {
            run = 0;
            continue;
        }
        ++run;
        if (run >= 2) {
            const std::size_t idx = NnParameterTable::step_index(u[static_cast<std::size_t>(i - 1)],
                                                                 u[static_cast<std::size_t>(i)]);
            dg += table.stack_dh[idx] - temperature_k * table.stack_ds[idx] / 1000.0;
        }
    }
    return dg;
}

}  // namespace detail

// Minimum dG over all relative offsets; 0 when nothing binds.
inline double hybridization_dg(const DnaSeq& u, const DnaSeq& v, const NnParameterTable& table,
                               const ThermoConfig& config) {
    if (u.empty() || v.empty()) throw std::domain_error("hybridization_dg: empty strand");
    config.validate();
    double best = 0.0;
    const int nu = static_cast<int>(u.size());
    const int nv = static_cast<int>(v.size());
    for (int offset = -(nv - 1); offset <= nu - 1; ++offset) {
        const double dg = detail::offset_dg(u, v, offset, table, config.evaluation_temperature);
        if (dg < best) best = dg;
    }
    return best;
}

inline DnaSeq complement_strand(const DnaSeq& seq) {
    std::string out;
    out.reserve(seq.size());
    for (char c : seq) out.push_back(complement(c));
    return DnaSeq::unchecked(std::move(out));
}

// min{dG(u,v), dG(u,v'), dG(u',v')} where a primed strand is the complement.
inline double mfe(const DnaSeq& u, const DnaSeq& v, const NnParameterTable& table,
                  const ThermoConfig& config) {
    const DnaSeq up = complement_strand(u);
    const DnaSeq vp = complement_strand(v);
    const double a = hybridization_dg(u, v, table, config);
    const double b = hybridization_dg(u, vp, table, config);
    const double c = hybridization_dg(up, vp, table, config);
    return std::min(a, std::min(b, c));
}

struct MfeStats {
    double mean = 0.0;    // of MFE_i / L_i, kcal/mol per nt
    double stddev = 0.0;  // population standard deviation
};

inline MfeStats mfe_statistics(const std::vector<DnaSeq>& seqs, const NnParameterTable& table,
                               const ThermoConfig& config) {
    if (seqs.empty()) throw std::domain_error("mfe_statistics: empty sequence set");
    std::vector<double> values;
    values.reserve(seqs.size());
    for (const auto& s : seqs)
        values.push_back(mfe(s, s, table, config) / static_cast<double>(s.size()));
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
}

}  // namespace dnastore::thermo
