// End-to-end file <-> DNA conversion. A file is zero-padded into blocks of
// rows_per_block rows, each row holding rs.k data bytes; rows are RS-encoded
// to rs.n symbols. Identity mode transcodes code rows directly (4 nt per
// byte). Learned mode stores the quantized model representation instead and
// recovers rows by declaring the masked symbol positions as erasures.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dnastore/base_map.hpp"
#include "dnastore/block.hpp"
#include "dnastore/errors.hpp"
#include "dnastore/learner/loss.hpp"
#include "dnastore/learner/model.hpp"
#include "dnastore/reed_solomon.hpp"

namespace dnastore::pipeline {

enum class Mode { identity, learned };

inline std::string mode_name(Mode m) { return m == Mode::identity ? "identity" : "learned"; }
inline Mode mode_from_name(const std::string& s) {
    if (s == "identity") return Mode::identity;
    if (s == "learned") return Mode::learned;
    throw FormatError("unknown mode: " + s);
}

struct PipelineConfig {
    rs::RsConfig rs{};
    std::size_t rows_per_block = 32;
    Mode mode = Mode::identity;
    learner::MaskSpec mask{{63}};  // symbol indices declared as erasures
    std::shared_ptr<const learner::ModelParameters> model;
    std::string model_hash;  // content hash of the model file, learned mode

    void validate() const {
        rs.validate();
        if (rows_per_block == 0) throw std::invalid_argument("pipeline: rows_per_block must be positive");
        for (std::size_t i : mask.masked_symbol_indices)
            if (i >= rs.n) throw std::invalid_argument("pipeline: mask index out of range");
        if (mode == Mode::learned) {
            if (!model) throw std::invalid_argument("pipeline: learned mode requires a model");
            if (model->config.tokens_in != rs.n)
                throw std::invalid_argument("pipeline: model tokens_in must equal rs.n");
            if (mask.masked_symbol_indices.size() > rs.parity())
                throw std::invalid_argument("pipeline: more masked symbols than parity");
        }
    }
};

inline constexpr char kManifestMagic[] = "DNASTORE";
inline constexpr std::uint32_t kManifestFormatVersion = 1;

struct Header {
    std::uint32_t version = kManifestFormatVersion;
    std::uint64_t original_length = 0;
    Mode mode = Mode::identity;
    rs::RsConfig rs{};
    std::size_t rows_per_block = 32;
    std::size_t block_count = 0;
    std::string model_hash = "-";  // "-" when no model is involved

    friend bool operator==(const Header&, const Header&) = default;
};

struct SequenceRecord {
    std::size_t block = 0;
    std::size_t row = 0;
    DnaSeq seq;
};

struct StoragePackage {
    Header header;
    std::vector<SequenceRecord> sequences;
};

struct RowOutcome {
    std::size_t block = 0;
    std::size_t row = 0;
    rs::DecodeStatus status = rs::DecodeStatus::uncorrectable;
    std::size_t errors_found = 0;
    std::size_t erasures_used = 0;
};

struct DecodeReport {
    std::vector<RowOutcome> rows;
    std::size_t uncorrectable_rows = 0;

    bool all_corrected() const { return uncorrectable_rows == 0; }
};

// Pads with zero bytes to whole blocks and RS-encodes every row.
inline std::pair<std::vector<SymbolBlock>, Header> pack_file(std::span<const std::uint8_t> bytes,
                                                             const PipelineConfig& config) {
    config.validate();
    Header header;
    header.original_length = bytes.size();
    header.mode = config.mode;
    header.rs = config.rs;
    header.rows_per_block = config.rows_per_block;
    header.model_hash = config.mode == Mode::learned ? config.model_hash : "-";

    const std::size_t k = config.rs.k;
    const std::size_t bytes_per_block = k * config.rows_per_block;
    const std::size_t blocks =
        bytes.empty() ? 0 : (bytes.size() + bytes_per_block - 1) / bytes_per_block;
    header.block_count = blocks;

    const rs::RsCodec codec(config.rs);
    std::vector<SymbolBlock> out;
    out.reserve(blocks);
    std::vector<std::uint8_t> message(k, 0);
    for (std::size_t b = 0; b < blocks; ++b) {
        SymbolBlock block(config.rows_per_block, config.rs.n);
        for (std::size_t r = 0; r < config.rows_per_block; ++r) {
            std::fill(message.begin(), message.end(), 0);
            const std::size_t offset = b * bytes_per_block + r * k;
            if (offset < bytes.size()) {
                const std::size_t take = std::min(k, bytes.size() - offset);
                std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(offset),
                          bytes.begin() + static_cast<std::ptrdiff_t>(offset + take),
                          message.begin());
            }
            const rs::RsCodeword cw = codec.encode(message);
            std::copy(cw.symbols.begin(), cw.symbols.end(), block.row(r).begin());
        }
        out.push_back(std::move(block));
    }
    return {std::move(out), header};
}

// Strips padding according to the header; blocks hold at least k message
// symbols per row (systematic layout).
inline std::vector<std::uint8_t> unpack(const std::vector<SymbolBlock>& blocks,
                                        const Header& header) {
    const std::size_t k = header.rs.k;
    std::size_t available = 0;
    for (const auto& b : blocks) {
        if (b.cols < k) throw FormatError("unpack: block row shorter than k");
        available += b.rows * k;
    }
    if (header.original_length > available)
        throw FormatError("unpack: header length exceeds payload");
    std::vector<std::uint8_t> out;
    out.reserve(header.original_length);
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < b.rows && out.size() < header.original_length; ++r) {
            const std::size_t take =
                std::min(k, static_cast<std::size_t>(header.original_length - out.size()));
            const auto row = b.row(r);
            out.insert(out.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(take));
        }
    }
    return out;
}

inline StoragePackage encode(std::span<const std::uint8_t> bytes, const PipelineConfig& config) {
    auto [blocks, header] = pack_file(bytes, config);
    StoragePackage pkg;
    pkg.header = header;
    pkg.sequences.reserve(blocks.size() * config.rows_per_block);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (config.mode == Mode::identity) {
            for (std::size_t r = 0; r < blocks[b].rows; ++r)
                pkg.sequences.push_back({b, r, base_map::bytes_to_dna(blocks[b].row(r))});
        } else {
            const auto probs = learner::encode_block(*config.model, blocks[b]);
            for (std::size_t r = 0; r < blocks[b].rows; ++r) {
                const auto symbols = learner::bits_to_row(probs[r]);
                pkg.sequences.push_back({b, r, base_map::bytes_to_dna(symbols)});
            }
        }
    }
    return pkg;
}

namespace detail {

// RS decoding of one reconstructed code row with the configured erasures.
inline RowOutcome decode_row(const rs::RsCodec& codec, std::span<const std::uint8_t> symbols,
                             std::span<const std::size_t> erasures, std::size_t block,
                             std::size_t row, std::vector<std::uint8_t>& message_out) {
    const rs::DecodeOutcome outcome = codec.decode(symbols, erasures);
    message_out.assign(outcome.message.begin(), outcome.message.end());
    return {block, row, outcome.status, outcome.errors_found, outcome.erasures_used};
}

}  // namespace detail

inline std::pair<std::vector<std::uint8_t>, DecodeReport> decode(const StoragePackage& pkg,
                                                                 const PipelineConfig& config) {
    config.validate();
    const Header& header = pkg.header;
    if (config.mode != header.mode) throw std::invalid_argument("decode: mode disagrees with package");
    if (config.mode == Mode::learned && config.model_hash != header.model_hash)
        throw ModelMismatchError("decode: model hash " + config.model_hash +
                                 " does not match package " + header.model_hash);
    if (pkg.sequences.size() != header.block_count * header.rows_per_block)
        throw FormatError("decode: sequence count does not match header");

    const rs::RsCodec codec(header.rs);
    const std::size_t k = header.rs.k;

    // Rows may arrive in any order; address them by (block, row).
    std::vector<SymbolBlock> message_blocks(header.block_count);
    for (auto& b : message_blocks) b = SymbolBlock(header.rows_per_block, k);
    std::vector<char> seen(header.block_count * header.rows_per_block, 0);

    DecodeReport report;
    report.rows.resize(header.block_count * header.rows_per_block);
    std::vector<std::uint8_t> message;
    const std::vector<std::size_t> erasures =
        config.mode == Mode::learned ? config.mask.masked_symbol_indices : std::vector<std::size_t>{};

    for (const SequenceRecord& rec : pkg.sequences) {
        if (rec.block >= header.block_count || rec.row >= header.rows_per_block)
            throw FormatError("decode: sequence index out of range");
        const std::size_t flat = rec.block * header.rows_per_block + rec.row;
        if (seen[flat]) throw FormatError("decode: duplicate sequence record");
        seen[flat] = 1;

        std::vector<std::uint8_t> code_row;
        if (config.mode == Mode::identity) {
            code_row = base_map::dna_to_bytes(rec.seq);
            if (code_row.size() != header.rs.n)
                throw FormatError("decode: sequence length inconsistent with rs.n");
        } else {
            const auto rep_symbols = base_map::dna_to_bytes(rec.seq);
            if (rep_symbols.size() != config.model->config.tokens_out)
                throw FormatError("decode: sequence length inconsistent with the model");
            const learner::Matrix rep_bits =
                learner::row_to_bits(rep_symbols, config.model->config.symbol_bits);
            const learner::Matrix probs = learner::decode_row(*config.model, rep_bits);
            code_row = learner::bits_to_row(probs);
        }
        RowOutcome outcome =
            detail::decode_row(codec, code_row, erasures, rec.block, rec.row, message);
        if (outcome.status == rs::DecodeStatus::uncorrectable) ++report.uncorrectable_rows;
        std::copy(message.begin(), message.end(), message_blocks[rec.block].row(rec.row).begin());
        report.rows[flat] = outcome;
    }
    for (char s : seen)
        if (!s) throw FormatError("decode: missing sequence records");

    return {unpack(message_blocks, header), std::move(report)};
}

}  // namespace dnastore::pipeline
