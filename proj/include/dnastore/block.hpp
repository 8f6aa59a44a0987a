// A block of code rows: rows x cols matrix of 8-bit symbols. The row is the
// codec unit (one codeword, one strand); the block is the batching unit.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace dnastore {

struct SymbolBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> data;  // row-major

    SymbolBlock() = default;
    SymbolBlock(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

    std::uint8_t& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<const std::uint8_t> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    std::span<std::uint8_t> row(std::size_t r) { return {data.data() + r * cols, cols}; }

    friend bool operator==(const SymbolBlock&, const SymbolBlock&) = default;
};

}  // namespace dnastore
