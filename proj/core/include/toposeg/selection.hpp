#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace toposeg {

struct CheckpointEntry {
    std::string checkpoint_id;
    double mean_dice = 0.0;
    double mean_pd = 0.0;
};

/// Checkpoint selection: take the k entries with the highest mean Dice
/// (cutoff ties broken by lower mean PD, then lexicographic id) and return
/// the id with the smallest mean PD among them (ties broken by higher Dice,
/// then lexicographic id). Throws std::invalid_argument on an empty list,
/// duplicate ids, k < 1, or out-of-range values.
std::string select_checkpoint(const std::vector<CheckpointEntry>& entries, int k);

/// CSV log with the exact header "checkpoint_id,mean_dice,mean_pd".
std::vector<CheckpointEntry> read_checkpoint_log(const std::filesystem::path& path);

}  // namespace toposeg
