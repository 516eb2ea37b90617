#pragma once

#include <cstdint>
#include <stdexcept>

#include "toposeg/grids.hpp"

namespace toposeg {

/// Recipe for a synthetic mask with known topology: n_blobs rectangular
/// components separated by at least min_gap background pixels, with n_holes
/// rectangular holes distributed among them. The generated mask satisfies
/// betti_numbers == (n_blobs, n_holes) by construction.
struct SynthSpec {
    std::uint64_t seed = 0;
    int height = 0;
    int width = 0;
    int n_blobs = 0;
    int n_holes = 0;
    int min_gap = 2;
};

/// Thrown when the grid cannot fit the requested blobs after bounded retries.
class SynthCapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic for a fixed spec (same seed, same mask, bit for bit).
BinaryMask synth_mask(const SynthSpec& spec);

}  // namespace toposeg
