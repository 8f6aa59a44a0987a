// On-disk package format: a key-value manifest (manifest.txt) plus a FASTA
// file (sequences.fasta) whose records are named ">b<block>_r<row>" with
// sequence lines wrapped at 80 columns. Writing is canonical, so a
// write/read/write cycle is byte-identical.
#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dnastore/errors.hpp"
#include "dnastore/pipeline.hpp"
#include "dnastore/util.hpp"

namespace dnastore::package_io {

inline constexpr std::size_t kFastaWrap = 80;
inline constexpr const char* kManifestName = "manifest.txt";
inline constexpr const char* kFastaName = "sequences.fasta";

inline std::string manifest_text(const pipeline::Header& h) {
    std::ostringstream out;
    out << "magic = " << pipeline::kManifestMagic << "\n";
    out << "version = " << h.version << "\n";
    out << "mode = " << pipeline::mode_name(h.mode) << "\n";
    out << "original_length = " << h.original_length << "\n";
    out << "rs_n = " << h.rs.n << "\n";
    out << "rs_k = " << h.rs.k << "\n";
    out << "rs_symbol_bits = " << h.rs.symbol_bits << "\n";
    out << "rs_field_polynomial = " << h.rs.field_polynomial << "\n";
    out << "rs_first_root_exponent = " << h.rs.first_root_exponent << "\n";
    out << "rows_per_block = " << h.rows_per_block << "\n";
    out << "block_count = " << h.block_count << "\n";
    out << "model_hash = " << h.model_hash << "\n";
    return out.str();
}

inline pipeline::Header parse_manifest(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) throw FormatError("manifest: malformed line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw FormatError("manifest: missing key: " + key);
        return it->second;
    };
    auto to_u64 = [&](const std::string& key) -> std::uint64_t {
        const std::string& s = need(key);
        std::uint64_t v = 0;
        const auto* begin = s.data();
        const auto* end = s.data() + s.size();
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{} || res.ptr != end)
            throw FormatError("manifest: bad integer for " + key + ": " + s);
        return v;
    };
    if (need("magic") != pipeline::kManifestMagic) throw FormatError("manifest: bad magic");
    pipeline::Header h;
    h.version = static_cast<std::uint32_t>(to_u64("version"));
    if (h.version != pipeline::kManifestFormatVersion)
        throw FormatError("manifest: unsupported version");
    h.mode = pipeline::mode_from_name(need("mode"));
    h.original_length = to_u64("original_length");
    h.rs.n = to_u64("rs_n");
    h.rs.k = to_u64("rs_k");
    h.rs.symbol_bits = static_cast<unsigned>(to_u64("rs_symbol_bits"));
    h.rs.field_polynomial = static_cast<unsigned>(to_u64("rs_field_polynomial"));
    h.rs.first_root_exponent = static_cast<unsigned>(to_u64("rs_first_root_exponent"));
    h.rows_per_block = to_u64("rows_per_block");
    h.block_count = to_u64("block_count");
    h.model_hash = need("model_hash");
    h.rs.validate();
    return h;
}

inline std::string fasta_text(const std::vector<pipeline::SequenceRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += ">b" + std::to_string(rec.block) + "_r" + std::to_string(rec.row) + "\n";
        const std::string& s = rec.seq.str();
        for (std::size_t i = 0; i < s.size(); i += kFastaWrap) {
            out.append(s, i, std::min(kFastaWrap, s.size() - i));
            out += '\n';
        }
        if (s.empty()) out += '\n';
    }
    return out;
}

// Parses FASTA records; headers other than the package naming scheme raise a
// format error when require_package_names is set, otherwise records are
// numbered in file order.
inline std::vector<pipeline::SequenceRecord> parse_fasta(const std::string& text,
                                                         bool require_package_names = true) {
    std::vector<pipeline::SequenceRecord> records;
    std::istringstream in(text);
    std::string line;
    std::string pending;
    bool have_record = false;
    pipeline::SequenceRecord current;
    std::size_t auto_index = 0;
    auto flush = [&]() {
        if (!have_record) return;
        current.seq = DnaSeq(pending);  // validates the alphabet
        records.push_back(std::move(current));
        current = {};
        pending.clear();
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '>') {
            flush();
            have_record = true;
            const std::string name = line.substr(1);
            std::size_t block = 0, row = 0;
            bool parsed = false;
            if (name.size() > 1 && name[0] == 'b') {
                const auto underscore = name.find("_r");
                if (underscore != std::string::npos) {
                    try {
                        block = std::stoull(name.substr(1, underscore - 1));
                        row = std::stoull(name.substr(underscore + 2));
                        parsed = true;
                    } catch (...) {
                        parsed = false;
                    }
                }
            }
            if (!parsed) {
                if (require_package_names)
                    throw FormatError("fasta: record name not in b<block>_r<row> form: " + name);
                block = 0;
                row = auto_index;
            }
            current.block = block;
            current.row = row;
            ++auto_index;
        } else {
            if (!have_record) throw FormatError("fasta: sequence data before any header");
            pending += line;
        }
    }
    flush();
    if (records.empty()) throw FormatError("fasta: no records");
    return records;
}

inline void write_package(const std::filesystem::path& dir, const pipeline::StoragePackage& pkg) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    atomic_write_file(dir / kManifestName, manifest_text(pkg.header));
    atomic_write_file(dir / kFastaName, fasta_text(pkg.sequences));
}

inline pipeline::StoragePackage read_package(const std::filesystem::path& dir) {
    const auto manifest_bytes = read_file_bytes(dir / kManifestName);
    const auto fasta_bytes = read_file_bytes(dir / kFastaName);
    pipeline::StoragePackage pkg;
    pkg.header = parse_manifest(std::string(manifest_bytes.begin(), manifest_bytes.end()));
    pkg.sequences = parse_fasta(std::string(fasta_bytes.begin(), fasta_bytes.end()));
    return pkg;
}

}  // namespace dnastore::package_io
