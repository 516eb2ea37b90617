#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "toposeg/grids.hpp"

namespace toposeg {

enum class IoErrorKind {
    open_failed,
    bad_magic,
    bad_header,
    dimension_overflow,
    truncated,
    value_out_of_range,
    write_failed,
};

class IoError : public std::runtime_error {
public:
    IoError(IoErrorKind kind, const std::filesystem::path& path, const std::string& message)
        : std::runtime_error(path.string() + ": " + message), kind_(kind) {}

    IoErrorKind kind() const { return kind_; }

private:
    IoErrorKind kind_;
};

/// Binary PGM (P5, maxval 255). Reading maps pixel > 127 to foreground;
/// writing emits 0/255, so write -> read round-trips exactly.
BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Probability map file: magic "PMAP1\n", ASCII "<height> <width>\n", then
/// height*width little-endian 32-bit floats in row-major order. Values
/// outside [0,1] are rejected on read.
ProbMap read_probmap(const std::filesystem::path& path);
void write_probmap(const ProbMap& p, const std::filesystem::path& path);

/// Load a prediction from either format, sniffed by magic bytes; PGM masks
/// become 0/1 probability maps.
ProbMap read_prediction(const std::filesystem::path& path);

}  // namespace toposeg
