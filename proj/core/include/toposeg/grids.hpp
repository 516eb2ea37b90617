#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace toposeg {

/// Row-major 2D grid of {0,1} pixels. Height and width are strictly positive.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int height, int width);
    BinaryMask(int height, int width, std::vector<std::uint8_t> pixels);

    int height() const { return height_; }
    int width() const { return width_; }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(height_) * width_; }

    std::uint8_t at(int row, int col) const { return pixels_[index(row, col)]; }
    void set(int row, int col, bool foreground) { pixels_[index(row, col)] = foreground ? 1 : 0; }

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::span<const std::uint8_t> pixels() const { return pixels_; }
    std::int64_t foreground_count() const;

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> pixels_;
};

/// Row-major 2D grid of probabilities. Values are validated into [0,1] on
/// construction; excursions up to kProbTolerance outside the range are
/// clamped, anything further is rejected.
class ProbMap {
public:
    static constexpr double kProbTolerance = 1e-9;

    ProbMap() = default;
    ProbMap(int height, int width);
    ProbMap(int height, int width, std::vector<double> values);

    static ProbMap from_mask(const BinaryMask& mask);

    int height() const { return height_; }
    int width() const { return width_; }
    std::int64_t pixel_count() const { return static_cast<std::int64_t>(height_) * width_; }

    double at(int row, int col) const { return values_[index(row, col)]; }
    void set(int row, int col, double value);

    std::span<const double> values() const { return values_; }

    bool operator==(const ProbMap&) const = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> values_;
};

/// Partial derivatives with respect to every pixel of a ProbMap.
struct GradMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    GradMap() = default;
    GradMap(int h, int w) : height(h), width(w), values(static_cast<std::size_t>(h) * w, 0.0) {}

    double at(int row, int col) const {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    double& at(int row, int col) {
        return values[static_cast<std::size_t>(row) * width + col];
    }

    void scale(double factor);
    double max_abs() const;
};

inline bool same_shape(const ProbMap& p, const BinaryMask& m) {
    return p.height() == m.height() && p.width() == m.width();
}
inline bool same_shape(const BinaryMask& a, const BinaryMask& b) {
    return a.height() == b.height() && a.width() == b.width();
}

/// Scalar loss together with its gradient map.
struct LossResult {
    double value = 0.0;
    GradMap grad;
};

}  // namespace toposeg
