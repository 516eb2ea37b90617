#pragma once

#include "toposeg/grids.hpp"

namespace toposeg {

/// Differentiable Euler characteristic of a probability map:
///
///   chi_soft(P) = sum P(i,j)
///               - sum P(i,j)*P(i,j+1)            (horizontal pairs)
///               - sum P(i,j)*P(i+1,j)            (vertical pairs)
///               + sum over 2x2 blocks of the product of all four values.
///
/// Sums simply omit out-of-range indices. On {0,1} input this equals
/// euler_characteristic() exactly (all terms are exact in floating point).
double soft_euler_char(const ProbMap& p);

/// Analytic partial derivatives of soft_euler_char with respect to every pixel.
GradMap soft_euler_grad(const ProbMap& p);

/// Squared mismatch between the soft Euler characteristic of a prediction and
/// the exact Euler characteristic of the ground-truth mask, with its gradient.
LossResult soft_euler_loss(const ProbMap& p, const BinaryMask& ground_truth);

/// Smoothed anisotropic total variation:
///   sum over adjacent pairs of sqrt(diff^2 + eps^2), minus pair_count * eps
/// so that constant maps score exactly zero. Differentiable everywhere.
LossResult tv_loss(const ProbMap& p, double smooth_eps);

struct LossWeights {
    double w_seg = 1.0;
    double w_contrast = 1.0;
    double w_topo = 1.0;
    int epoch = 0;
};

/// Warm-up schedule for the topology term: zero before warmup_epochs, then a
/// linear ramp of ramp_epochs up to base.w_topo (a hard step when
/// ramp_epochs == 0). Segmentation and contrastive weights pass through.
LossWeights loss_weight_schedule(int epoch, int warmup_epochs, int ramp_epochs,
                                 const LossWeights& base);

}  // namespace toposeg
