#pragma once

#include <string>

#include "toposeg/grids.hpp"
#include "toposeg/persistence.hpp"

namespace toposeg {

/// Per-sample bundle of structure-aware evaluation metrics.
struct MetricsRecord {
    std::string sample_id;
    double dice = 0.0;
    double iou = 0.0;
    double bf1 = 0.0;
    int d_beta0 = 0;
    int d_beta1 = 0;
    double pd_dist = 0.0;
};

struct EvalConfig {
    double threshold = 0.5;  // prob -> mask cut, strictly inside (0,1)
    int bf1_tolerance = 2;   // boundary match tolerance in pixels
    DiagramDistanceConfig pd;
};

struct DiceIou {
    double dice = 0.0;
    double iou = 0.0;
};

/// Overlap scores. Two empty masks count as perfect agreement (1, 1).
DiceIou dice_iou(const BinaryMask& pred, const BinaryMask& gt);

/// Boundary F1: boundary pixels are foreground pixels with a 4-neighbor that
/// is background or off-grid; precision/recall match boundaries within
/// Euclidean distance <= tol. Returns 1 when both boundaries are empty,
/// 0 when precision + recall is 0.
double boundary_f1(const BinaryMask& pred, const BinaryMask& gt, int tol);

struct BettiErrors {
    int d_beta0 = 0;
    int d_beta1 = 0;
};

/// Absolute Betti number differences |b0(pred)-b0(gt)|, |b1(pred)-b1(gt)|.
BettiErrors betti_errors(const BinaryMask& pred, const BinaryMask& gt);

/// Soft Dice loss 1 - (2*sum(p*y) + smooth) / (sum(p) + sum(y) + smooth)
/// with analytic gradient.
LossResult dice_loss(const ProbMap& p, const BinaryMask& y, double smooth = 1.0);

/// Mean binary cross entropy with probabilities clamped to
/// [clamp_eps, 1 - clamp_eps]; gradient is zero where the clamp is active.
LossResult bce_loss(const ProbMap& p, const BinaryMask& y, double clamp_eps);

/// Pixels strictly above the threshold become foreground.
BinaryMask threshold_map(const ProbMap& p, double threshold);

/// All MetricsRecord fields for one sample; pd_dist is computed on the
/// un-thresholded probability map.
MetricsRecord evaluate_sample(std::string sample_id, const ProbMap& pred, const BinaryMask& gt,
                              const EvalConfig& cfg = {});

inline constexpr const char* kMetricsCsvHeader = "sample_id,dice,iou,bf1,d_beta0,d_beta1,pd_dist";

/// One CSV row in kMetricsCsvHeader column order. Doubles are printed with
/// shortest round-trip formatting, so parsing the row recovers exact values.
std::string to_csv_row(const MetricsRecord& r);

/// One JSON object with the exact field names of MetricsRecord.
std::string to_json_line(const MetricsRecord& r);

}  // namespace toposeg
