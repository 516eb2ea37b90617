#include "toposeg/selection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include "toposeg/io.hpp"

namespace toposeg {

std::string select_checkpoint(const std::vector<CheckpointEntry>& entries, int k) {
    if (entries.empty()) {
        throw std::invalid_argument("select_checkpoint: empty checkpoint list");
    }
    if (k < 1) {
        throw std::invalid_argument("select_checkpoint: k must be at least 1");
    }
    std::unordered_set<std::string> seen;
    for (const CheckpointEntry& e : entries) {
        if (!seen.insert(e.checkpoint_id).second) {
            throw std::invalid_argument("select_checkpoint: duplicate checkpoint id '" +
                                        e.checkpoint_id + "'");
        }
        if (!std::isfinite(e.mean_dice) || e.mean_dice < 0.0 || e.mean_dice > 1.0) {
            throw std::invalid_argument("select_checkpoint: mean_dice outside [0,1] for '" +
                                        e.checkpoint_id + "'");
        }
        if (!std::isfinite(e.mean_pd) || e.mean_pd < 0.0) {
            throw std::invalid_argument("select_checkpoint: mean_pd must be non-negative for '" +
                                        e.checkpoint_id + "'");
        }
    }

    std::vector<CheckpointEntry> sorted = entries;
    std::sort(sorted.begin(), sorted.end(), [](const CheckpointEntry& a, const CheckpointEntry& b) {
        if (a.mean_dice != b.mean_dice) {
            return a.mean_dice > b.mean_dice;
        }
        if (a.mean_pd != b.mean_pd) {
            return a.mean_pd < b.mean_pd;
        }
        return a.checkpoint_id < b.checkpoint_id;
    });
    sorted.resize(std::min<std::size_t>(sorted.size(), static_cast<std::size_t>(k)));

    const auto best = std::min_element(
        sorted.begin(), sorted.end(), [](const CheckpointEntry& a, const CheckpointEntry& b) {
            if (a.mean_pd != b.mean_pd) {
                return a.mean_pd < b.mean_pd;
            }
            if (a.mean_dice != b.mean_dice) {
                return a.mean_dice > b.mean_dice;
            }
            return a.checkpoint_id < b.checkpoint_id;
        });
    return best->checkpoint_id;
}

std::vector<CheckpointEntry> read_checkpoint_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError(IoErrorKind::open_failed, path, "cannot open for reading");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(IoErrorKind::truncated, path, "empty checkpoint log");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "checkpoint_id,mean_dice,mean_pd") {
        throw IoError(IoErrorKind::bad_header, path,
                      "expected header 'checkpoint_id,mean_dice,mean_pd'");
    }

    auto parse_double = [&](std::string_view field, std::size_t line_no) {
        double value = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
        if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
            throw IoError(IoErrorKind::bad_header, path,
                          "malformed number on line " + std::to_string(line_no));
        }
        return value;
    };

    std::vector<CheckpointEntry> entries;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            throw IoError(IoErrorKind::bad_header, path,
                          "expected 3 columns on line " + std::to_string(line_no));
        }
        CheckpointEntry e;
        e.checkpoint_id = line.substr(0, c1);
        if (e.checkpoint_id.empty()) {
            throw IoError(IoErrorKind::bad_header, path,
                          "empty checkpoint id on line " + std::to_string(line_no));
        }
        e.mean_dice = parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), line_no);
        e.mean_pd = parse_double(std::string_view(line).substr(c2 + 1), line_no);
        entries.push_back(std::move(e));
    }
    return entries;
}

}  // namespace toposeg
