#include "toposeg/grids.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace toposeg {

namespace {

void check_dims(int height, int width) {
    if (height <= 0 || width <= 0) {
        throw std::invalid_argument("grid dimensions must be positive, got " +
                                    std::to_string(height) + "x" + std::to_string(width));
    }
}

}  // namespace

BinaryMask::BinaryMask(int height, int width) : height_(height), width_(width) {
    check_dims(height, width);
    pixels_.assign(static_cast<std::size_t>(height) * width, 0);
}

BinaryMask::BinaryMask(int height, int width, std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
    check_dims(height, width);
    if (pixels_.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("pixel buffer length does not match height*width");
    }
    for (std::uint8_t v : pixels_) {
        if (v > 1) {
            throw std::invalid_argument("mask pixels must be 0 or 1");
        }
    }
}

std::int64_t BinaryMask::foreground_count() const {
    return std::accumulate(pixels_.begin(), pixels_.end(), std::int64_t{0});
}

ProbMap::ProbMap(int height, int width) : height_(height), width_(width) {
    check_dims(height, width);
    values_.assign(static_cast<std::size_t>(height) * width, 0.0);
}

ProbMap::ProbMap(int height, int width, std::vector<double> values)
    : height_(height), width_(width), values_(std::move(values)) {
    check_dims(height, width);
    if (values_.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("value buffer length does not match height*width");
    }
    for (double& v : values_) {
        if (!std::isfinite(v) || v < -kProbTolerance || v > 1.0 + kProbTolerance) {
            throw std::invalid_argument("probability value outside [0,1]: " + std::to_string(v));
        }
        v = std::clamp(v, 0.0, 1.0);
    }
}

ProbMap ProbMap::from_mask(const BinaryMask& mask) {
    ProbMap p(mask.height(), mask.width());
    for (int r = 0; r < mask.height(); ++r) {
        for (int c = 0; c < mask.width(); ++c) {
            p.values_[p.index(r, c)] = mask.at(r, c) ? 1.0 : 0.0;
        }
    }
    return p;
}

void ProbMap::set(int row, int col, double value) {
    if (!std::isfinite(value) || value < -kProbTolerance || value > 1.0 + kProbTolerance) {
        throw std::invalid_argument("probability value outside [0,1]: " + std::to_string(value));
    }
    values_[index(row, col)] = std::clamp(value, 0.0, 1.0);
}

void GradMap::scale(double factor) {
    for (double& v : values) {
        v *= factor;
    }
}

double GradMap::max_abs() const {
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace toposeg
