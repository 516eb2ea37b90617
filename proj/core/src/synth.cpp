#include "toposeg/synth.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <vector>

#include "toposeg/grid_topology.hpp"

namespace toposeg {

namespace {

struct Rect {
    int row = 0;
    int col = 0;
    int height = 0;
    int width = 0;

    int row_end() const { return row + height; }
    int col_end() const { return col + width; }
};

bool rects_closer_than(const Rect& a, const Rect& b, int gap) {
    // True when the background separation between the rectangles is < gap
    // on both axes (i.e. the gap-expanded boxes overlap).
    const bool rows_ok = a.row_end() + gap <= b.row || b.row_end() + gap <= a.row;
    const bool cols_ok = a.col_end() + gap <= b.col || b.col_end() + gap <= a.col;
    return !rows_ok && !cols_ok;
}

int bounded(std::mt19937_64& rng, int lo, int hi) {
    // Inclusive range; modulo bias is irrelevant here.
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

}  // namespace

BinaryMask synth_mask(const SynthSpec& spec) {
    if (spec.height <= 0 || spec.width <= 0) {
        throw std::invalid_argument("synth_mask: grid dimensions must be positive");
    }
    if (spec.n_blobs < 0 || spec.n_holes < 0) {
        throw std::invalid_argument("synth_mask: blob and hole counts must be non-negative");
    }
    if (spec.min_gap < 2) {
        throw std::invalid_argument("synth_mask: min_gap must be at least 2");
    }
    if (spec.n_blobs == 0 && spec.n_holes > 0) {
        throw std::invalid_argument("synth_mask: holes require at least one blob");
    }

    std::mt19937_64 rng(spec.seed);
    constexpr int kMaxPlacementTries = 500;
    constexpr int kMaxLayoutTries = 16;

    for (int layout_try = 0; layout_try < kMaxLayoutTries; ++layout_try) {
        BinaryMask mask(spec.height, spec.width);
        std::vector<Rect> placed;
        bool layout_failed = false;

        for (int blob = 0; blob < spec.n_blobs && !layout_failed; ++blob) {
            // Round-robin hole distribution over blobs.
            int holes = spec.n_holes / spec.n_blobs;
            if (blob < spec.n_holes % spec.n_blobs) {
                ++holes;
            }

            // Hole cells sit in a row, 1 px of wall around and between them;
            // the wall seals each hole from the 8-connected outer background.
            std::vector<std::pair<int, int>> hole_sizes(holes);
            int inner_width = 0;
            int inner_height = 0;
            for (auto& [hh, hw] : hole_sizes) {
                hh = bounded(rng, 1, 2);
                hw = bounded(rng, 1, 2);
                inner_width += hw + 1;
                inner_height = std::max(inner_height, hh);
            }

            Rect rect;
            rect.height = holes > 0 ? inner_height + 2 : bounded(rng, 1, 5);
            rect.width = holes > 0 ? inner_width + 1 : bounded(rng, 1, 5);
            if (rect.height > spec.height || rect.width > spec.width) {
                layout_failed = true;
                break;
            }

            bool placed_ok = false;
            for (int attempt = 0; attempt < kMaxPlacementTries; ++attempt) {
                rect.row = bounded(rng, 0, spec.height - rect.height);
                rect.col = bounded(rng, 0, spec.width - rect.width);
                const bool collides =
                    std::any_of(placed.begin(), placed.end(), [&](const Rect& other) {
                        return rects_closer_than(rect, other, spec.min_gap);
                    });
                if (!collides) {
                    placed_ok = true;
                    break;
                }
            }
            if (!placed_ok) {
                layout_failed = true;
                break;
            }
            placed.push_back(rect);

            for (int r = rect.row; r < rect.row_end(); ++r) {
                for (int c = rect.col; c < rect.col_end(); ++c) {
                    mask.set(r, c, true);
                }
            }
            int hole_col = rect.col + 1;
            for (const auto& [hh, hw] : hole_sizes) {
                for (int r = rect.row + 1; r < rect.row + 1 + hh; ++r) {
                    for (int c = hole_col; c < hole_col + hw; ++c) {
                        mask.set(r, c, false);
                    }
                }
                hole_col += hw + 1;
            }
        }

        if (layout_failed) {
            continue;
        }
        const BettiPair betti = betti_numbers(mask);
        if (betti.beta0 == spec.n_blobs && betti.beta1 == spec.n_holes) {
            return mask;
        }
        // Rectangles placed by bbox separation can in rare arrangements pocket
        // extra background; redraw from the same stream.
    }
    throw SynthCapacityError("synth_mask: could not place " + std::to_string(spec.n_blobs) +
                             " blobs with gap " + std::to_string(spec.min_gap) + " on a " +
                             std::to_string(spec.height) + "x" + std::to_string(spec.width) +
                             " grid");
}

}  // namespace toposeg
