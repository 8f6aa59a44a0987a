// Error types shared across the library. Argument and domain violations use
// the std exceptions directly; these cover file formats, I/O and training.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dnastore {

class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class ModelMismatchError : public std::runtime_error {
public:
    explicit ModelMismatchError(const std::string& what) : std::runtime_error(what) {}
};

class TrainingDivergedError : public std::runtime_error {
public:
    TrainingDivergedError(std::size_t epoch, const std::string& what)
        : std::runtime_error(what), epoch_(epoch) {}
    std::size_t epoch() const { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace dnastore
