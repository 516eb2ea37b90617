#pragma once

#include <filesystem>
#include <string_view>

#include "toposeg/metrics.hpp"

namespace toposeg {

/// Flat key=value tool configuration. Recognized keys (all optional):
///   threshold      prob -> mask cut, default 0.5
///   bf1_tolerance  boundary match tolerance in pixels, default 2
///   pd.kind        "wasserstein" or "bottleneck", default wasserstein
///   pd.q           Wasserstein order, default 1
///   select.k       top-K size for checkpoint selection, default 5
///   workers        evaluation worker threads, default 1
/// Lines starting with '#' and blank lines are ignored.
struct ToolConfig {
    EvalConfig eval;
    int select_k = 5;
    int workers = 1;
};

ToolConfig parse_config_text(std::string_view text);
ToolConfig parse_config_file(const std::filesystem::path& path);

}  // namespace toposeg
