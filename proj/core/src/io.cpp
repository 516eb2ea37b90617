#include "toposeg/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string_view>
#include <vector>

namespace toposeg {

namespace {

constexpr std::int64_t kMaxSide = 1'000'000;
constexpr std::int64_t kMaxPixels = 100'000'000;

// Next ASCII integer token, skipping whitespace and '#' comments.
std::int64_t next_header_int(std::istream& in, const std::filesystem::path& path) {
    int ch = in.get();
    while (ch != EOF && (std::isspace(ch) || ch == '#')) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') {
                ch = in.get();
            }
        }
        ch = in.get();
    }
    if (ch == EOF || !std::isdigit(ch)) {
        throw IoError(IoErrorKind::bad_header, path, "expected integer in header");
    }
    std::int64_t value = 0;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        if (value > kMaxSide * kMaxSide) {
            throw IoError(IoErrorKind::dimension_overflow, path, "header value overflows");
        }
        ch = in.get();
    }
    if (ch != EOF) {
        in.unget();
    }
    return value;
}

void check_dims(std::int64_t height, std::int64_t width, const std::filesystem::path& path) {
    if (height <= 0 || width <= 0) {
        throw IoError(IoErrorKind::bad_header, path, "dimensions must be positive");
    }
    if (height > kMaxSide || width > kMaxSide || height * width > kMaxPixels) {
        throw IoError(IoErrorKind::dimension_overflow, path,
                      "image dimensions exceed supported size");
    }
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path, "cannot open for reading");
    }
    return in;
}

BinaryMask read_mask_stream(std::istream& in, const std::filesystem::path& path) {
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
        throw IoError(IoErrorKind::bad_magic, path, "not a binary PGM (P5) file");
    }
    const std::int64_t width = next_header_int(in, path);
    const std::int64_t height = next_header_int(in, path);
    const std::int64_t maxval = next_header_int(in, path);
    check_dims(height, width, path);
    if (maxval != 255) {
        throw IoError(IoErrorKind::bad_header, path, "maxval must be 255");
    }
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
        throw IoError(IoErrorKind::bad_header, path, "missing whitespace after maxval");
    }

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(height * width));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw IoError(IoErrorKind::truncated, path, "pixel payload shorter than header promises");
    }
    for (std::uint8_t& v : raw) {
        v = v > 127 ? 1 : 0;
    }
    return BinaryMask(static_cast<int>(height), static_cast<int>(width), std::move(raw));
}

ProbMap read_probmap_stream(std::istream& in, const std::filesystem::path& path) {
    char magic[6] = {};
    in.read(magic, 6);
    if (in.gcount() != 6 || std::string_view(magic, 6) != "PMAP1\n") {
        throw IoError(IoErrorKind::bad_magic, path, "not a PMAP1 file");
    }
    const std::int64_t height = next_header_int(in, path);
    const std::int64_t width = next_header_int(in, path);
    check_dims(height, width, path);
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep)) {
        throw IoError(IoErrorKind::bad_header, path, "missing newline after dimensions");
    }

    const std::size_t count = static_cast<std::size_t>(height * width);
    std::vector<std::uint8_t> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
        throw IoError(IoErrorKind::truncated, path, "float payload shorter than header promises");
    }

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
        const float v = std::bit_cast<float>(bits);
        if (!std::isfinite(v) || v < -static_cast<float>(ProbMap::kProbTolerance) ||
            v > 1.0f + static_cast<float>(ProbMap::kProbTolerance)) {
            throw IoError(IoErrorKind::value_out_of_range, path,
                          "probability value outside [0,1] at index " + std::to_string(i));
        }
        values[i] = std::clamp(static_cast<double>(v), 0.0, 1.0);
    }
    return ProbMap(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

}  // namespace

BinaryMask read_mask(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    return read_mask_stream(in, path);
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path, "cannot open for writing");
    }
    out << "P5\n" << mask.width() << " " << mask.height() << "\n255\n";
    std::vector<std::uint8_t> raw(mask.pixels().begin(), mask.pixels().end());
    for (std::uint8_t& v : raw) {
        v = v ? 255 : 0;
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path, "short write");
    }
}

ProbMap read_probmap(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    return read_probmap_stream(in, path);
}

void write_probmap(const ProbMap& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path, "cannot open for writing");
    }
    out << "PMAP1\n" << p.height() << " " << p.width() << "\n";
    std::vector<std::uint8_t> raw;
    raw.reserve(p.values().size() * 4);
    for (const double v : p.values()) {
        const float f = std::clamp(static_cast<float>(v), 0.0f, 1.0f);
        const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
        raw.push_back(static_cast<std::uint8_t>(bits & 0xff));
        raw.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xff));
        raw.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xff));
        raw.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xff));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) {
        throw IoError(IoErrorKind::write_failed, path, "short write");
    }
}

ProbMap read_prediction(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    const int first = in.peek();
    if (first == 'P') {
        char probe[2] = {0, 0};
        in.read(probe, 2);
        in.seekg(0);
        if (probe[1] == '5') {
            return ProbMap::from_mask(read_mask_stream(in, path));
        }
        return read_probmap_stream(in, path);
    }
    throw IoError(IoErrorKind::bad_magic, path, "unrecognized prediction format");
}

}  // namespace toposeg
