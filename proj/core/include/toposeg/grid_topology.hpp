#pragma once

#include <cstdint>
#include <vector>

#include "toposeg/grids.hpp"

namespace toposeg {

enum class Connectivity : int { four = 4, eight = 8 };

/// Per-pixel component ids: 0 = background, 1..count = foreground components.
/// Ids are assigned by the raster position of each component's first pixel,
/// so identical masks always get identical label maps.
struct LabelMap {
    int height = 0;
    int width = 0;
    std::vector<std::int32_t> labels;

    std::int32_t at(int row, int col) const {
        return labels[static_cast<std::size_t>(row) * width + col];
    }
};

struct ComponentLabeling {
    LabelMap label_map;
    int count = 0;
};

struct BettiPair {
    int beta0 = 0;
    int beta1 = 0;

    bool operator==(const BettiPair&) const = default;
};

/// Label maximal connected foreground regions under the given connectivity.
ComponentLabeling connected_components(const BinaryMask& mask, Connectivity connectivity);

/// Euler characteristic of the 4-connected foreground complex: pixels are
/// vertices, orthogonally adjacent pairs are edges, fully-filled 2x2 blocks
/// are faces. Equals beta0 - beta1 of that complex.
int euler_characteristic(const BinaryMask& mask);

/// beta0 from 4-connected labeling, beta1 = beta0 - euler_characteristic.
/// Throws std::logic_error if the combination would make beta1 negative,
/// which can only mean an implementation bug.
BettiPair betti_numbers(const BinaryMask& mask);

/// Independent hole count: number of 8-connected background components that
/// do not touch the image border. This is the dual convention for the
/// 4-connected foreground complex and must agree with betti_numbers().beta1.
int background_hole_count(const BinaryMask& mask);

}  // namespace toposeg
