#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "toposeg/grids.hpp"

namespace toposeg {

inline constexpr double kGradCheckStep = 1e-5;
inline constexpr double kGradCheckTolerance = 1e-5;

/// Relative error convention used throughout: |analytic - numeric| / (1 + |analytic|).
inline double gradcheck_rel_error(double analytic, double numeric) {
    const double diff = analytic > numeric ? analytic - numeric : numeric - analytic;
    return diff / (1.0 + (analytic < 0 ? -analytic : analytic));
}

/// Max relative error between an analytic gradient map and central finite
/// differences of an arbitrary scalar field over a probability map. Exposed
/// so tests can also point it at deliberately wrong gradients.
double probmap_grad_rel_error(const std::function<double(const ProbMap&)>& f, const ProbMap& at,
                              const GradMap& analytic, double step = kGradCheckStep);

/// Same for a scalar field over a flat coordinate vector.
double vector_grad_rel_error(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& at, const std::vector<double>& analytic,
                             double step = kGradCheckStep);

struct GradCheckEntry {
    std::string op;
    double max_rel_error = 0.0;
    int instances = 0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double tolerance = kGradCheckTolerance;

    bool passed() const;
    /// Name of the first entry over tolerance, empty when all pass.
    std::string first_failure() const;
};

/// Finite-difference verification of every differentiable operation in the
/// library (soft Euler characteristic and loss, total variation, Dice, BCE,
/// Poincare distance, contrastive loss) on seeded random inputs.
GradCheckReport run_gradchecks(std::uint64_t seed, int instances = 100, int grid_side = 8,
                               double tolerance = kGradCheckTolerance);

}  // namespace toposeg
