#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "toposeg/metrics.hpp"

namespace toposeg {

struct BatchOptions {
    EvalConfig eval;
    int workers = 1;
};

struct SampleFailure {
    std::string sample_id;
    std::string message;
};

/// Records sorted by sample id, plus per-sample failures (missing partner
/// file, unreadable file, shape mismatch). A failure never aborts the batch.
struct BatchResult {
    std::vector<MetricsRecord> records;
    std::vector<SampleFailure> failures;

    bool ok() const { return failures.empty() && !records.empty(); }
};

/// Pair predictions (*.pmap or *.pgm) with ground-truth masks (*.pgm) by
/// filename stem and evaluate each pair. Work fans out over a bounded worker
/// pool; output order and values are independent of the worker count.
BatchResult evaluate_directories(const std::filesystem::path& pred_dir,
                                 const std::filesystem::path& gt_dir,
                                 const BatchOptions& options);

/// CSV in kMetricsCsvHeader order: one row per record, then mean and median
/// summary rows (ids "mean" and "median"); Betti error columns of the summary
/// rows are fractional.
void write_metrics_csv(const BatchResult& result, std::ostream& out);

/// JSON-lines: one object per record, then mean and median summary objects.
void write_metrics_jsonl(const BatchResult& result, std::ostream& out);

}  // namespace toposeg
