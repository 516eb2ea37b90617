#include "toposeg/grid_topology.hpp"

#include <numeric>
#include <stdexcept>

namespace toposeg {

namespace {

// Path-compressing union-find over pixel indices.
class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            // Keep the smaller pixel index as root so labels come out in
            // raster-scan-first-pixel order without a separate pass.
            if (a > b) {
                std::swap(a, b);
            }
            parent_[b] = a;
        }
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

ComponentLabeling connected_components(const BinaryMask& mask, Connectivity connectivity) {
    const int h = mask.height();
    const int w = mask.width();
    DisjointSet dsu(static_cast<std::size_t>(h) * w);

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) {
                continue;
            }
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            if (c > 0 && mask.at(r, c - 1)) {
                dsu.unite(idx, idx - 1);
            }
            if (r > 0 && mask.at(r - 1, c)) {
                dsu.unite(idx, idx - w);
            }
            if (connectivity == Connectivity::eight && r > 0) {
                if (c > 0 && mask.at(r - 1, c - 1)) {
                    dsu.unite(idx, idx - w - 1);
                }
                if (c + 1 < w && mask.at(r - 1, c + 1)) {
                    dsu.unite(idx, idx - w + 1);
                }
            }
        }
    }

    ComponentLabeling out;
    out.label_map.height = h;
    out.label_map.width = w;
    out.label_map.labels.assign(static_cast<std::size_t>(h) * w, 0);

    // Roots are minimal pixel indices, so a raster walk assigns component ids
    // in first-pixel order.
    std::vector<std::int32_t> root_label(static_cast<std::size_t>(h) * w, 0);
    std::int32_t next = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) {
                continue;
            }
            const std::size_t idx = static_cast<std::size_t>(r) * w + c;
            const std::size_t root = dsu.find(idx);
            if (root_label[root] == 0) {
                root_label[root] = ++next;
            }
            out.label_map.labels[idx] = root_label[root];
        }
    }
    out.count = next;
    return out;
}

int euler_characteristic(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();
    std::int64_t faces = 0;       // single pixels
    std::int64_t edges_h = 0;     // horizontally adjacent pairs
    std::int64_t edges_v = 0;     // vertically adjacent pairs
    std::int64_t vertices2 = 0;   // fully filled 2x2 blocks

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (!mask.at(r, c)) {
                continue;
            }
            ++faces;
            const bool right = c + 1 < w && mask.at(r, c + 1);
            const bool down = r + 1 < h && mask.at(r + 1, c);
            if (right) {
                ++edges_h;
            }
            if (down) {
                ++edges_v;
            }
            if (right && down && mask.at(r + 1, c + 1)) {
                ++vertices2;
            }
        }
    }
    return static_cast<int>(faces - edges_h - edges_v + vertices2);
}

BettiPair betti_numbers(const BinaryMask& mask) {
    const int beta0 = connected_components(mask, Connectivity::four).count;
    const int chi = euler_characteristic(mask);
    const int beta1 = beta0 - chi;
    if (beta1 < 0) {
        throw std::logic_error("betti_numbers: beta1 < 0 (beta0=" + std::to_string(beta0) +
                               ", chi=" + std::to_string(chi) + "), euler computation is broken");
    }
    return BettiPair{beta0, beta1};
}

int background_hole_count(const BinaryMask& mask) {
    const int h = mask.height();
    const int w = mask.width();
    // visited: background pixels already assigned to some 8-connected region.
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(h) * w, 0);

    auto flood_background = [&](int sr, int sc) -> bool {
        // Returns true if the flooded region touches the image border.
        bool touches_border = false;
        std::vector<std::pair<int, int>> stack{{sr, sc}};
        visited[static_cast<std::size_t>(sr) * w + sc] = 1;
        while (!stack.empty()) {
            auto [r, c] = stack.back();
            stack.pop_back();
            if (r == 0 || c == 0 || r == h - 1 || c == w - 1) {
                touches_border = true;
            }
            for (int dr = -1; dr <= 1; ++dr) {
                for (int dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) {
                        continue;
                    }
                    const int nr = r + dr;
                    const int nc = c + dc;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) {
                        continue;
                    }
                    const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
                    if (mask.at(nr, nc) || visited[nidx]) {
                        continue;
                    }
                    visited[nidx] = 1;
                    stack.emplace_back(nr, nc);
                }
            }
        }
        return touches_border;
    };

    int holes = 0;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            if (mask.at(r, c) || visited[static_cast<std::size_t>(r) * w + c]) {
                continue;
            }
            if (!flood_background(r, c)) {
                ++holes;
            }
        }
    }
    return holes;
}

}  // namespace toposeg
