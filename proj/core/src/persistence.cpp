#include "toposeg/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "diagram_matching.hpp"
#include "toposeg/grid_topology.hpp"

namespace toposeg {

namespace {

double linf(const DiagramPoint& a, const DiagramPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

double diagonal_cost(const DiagramPoint& p) { return p.persistence() / 2.0; }

}  // namespace

void PersistenceDiagram::sort_canonical() {
    std::sort(points.begin(), points.end(), [](const DiagramPoint& a, const DiagramPoint& b) {
        if (a.persistence() != b.persistence()) {
            return a.persistence() > b.persistence();
        }
        if (a.birth != b.birth) {
            return a.birth > b.birth;
        }
        return a.death > b.death;
    });
}

PersistenceDiagram h0_superlevel_diagram(const ProbMap& p) {
    const int h = p.height();
    const int w = p.width();
    const std::size_t n = static_cast<std::size_t>(h) * w;
    const std::span<const double> values = p.values();

    // Pixels in descending value order; raster order breaks ties so plateaus
    // coalesce deterministically.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&values](std::size_t a, std::size_t b) {
        return values[a] > values[b];
    });

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<double> birth(n, 0.0);
    std::vector<std::uint8_t> active(n, 0);

    auto find = [&parent](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    PersistenceDiagram diagram;
    for (const std::size_t idx : order) {
        const double t = values[idx];
        active[idx] = 1;
        birth[idx] = t;

        const int r = static_cast<int>(idx / w);
        const int c = static_cast<int>(idx % w);
        const int neighbor_offsets[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
        for (const auto& off : neighbor_offsets) {
            const int nr = r + off[0];
            const int nc = c + off[1];
            if (nr < 0 || nr >= h || nc < 0 || nc >= w) {
                continue;
            }
            const std::size_t nidx = static_cast<std::size_t>(nr) * w + nc;
            if (!active[nidx]) {
                continue;
            }
            std::size_t ra = find(idx);
            std::size_t rb = find(nidx);
            if (ra == rb) {
                continue;
            }
            // Elder rule: the component with the lower birth dies here.
            if (birth[ra] < birth[rb]) {
                std::swap(ra, rb);
            }
            if (birth[rb] > t) {
                diagram.points.push_back(DiagramPoint{birth[rb], t});
            }
            parent[rb] = ra;
        }
    }

    // Surviving components are essential; they die at the bottom of the
    // codomain so diagrams stay bounded. Zero-persistence survivors (born at
    // exactly 0) are dropped like every other zero-persistence pair.
    for (std::size_t i = 0; i < n; ++i) {
        if (active[i] && find(i) == i && birth[i] > 0.0) {
            diagram.points.push_back(DiagramPoint{birth[i], 0.0});
        }
    }
    diagram.sort_canonical();
    return diagram;
}

PersistenceDiagram diagram_of_mask(const BinaryMask& mask) {
    const int components = connected_components(mask, Connectivity::four).count;
    PersistenceDiagram d;
    d.points.assign(static_cast<std::size_t>(components), DiagramPoint{1.0, 0.0});
    return d;
}

double wasserstein_pd(const PersistenceDiagram& a, const PersistenceDiagram& b, double q) {
    if (!(q >= 1.0)) {
        throw std::invalid_argument("wasserstein_pd: order q must be >= 1");
    }
    const std::size_t m = a.points.size();
    const std::size_t n = b.points.size();
    if (m == 0 && n == 0) {
        return 0.0;
    }

    // Pad each diagram with the other side's diagonal projections; every
    // diagonal slot is interchangeable, diagonal-to-diagonal costs nothing.
    const std::size_t size = m + n;
    std::vector<std::vector<double>> cost(size, std::vector<double>(size, 0.0));
    for (std::size_t i = 0; i < size; ++i) {
        for (std::size_t j = 0; j < size; ++j) {
            double base;
            if (i < m && j < n) {
                base = linf(a.points[i], b.points[j]);
            } else if (i < m) {
                base = diagonal_cost(a.points[i]);
            } else if (j < n) {
                base = diagonal_cost(b.points[j]);
            } else {
                base = 0.0;
            }
            cost[i][j] = q == 1.0 ? base : std::pow(base, q);
        }
    }
    const double total = detail::solve_assignment(cost);
    return q == 1.0 ? std::max(0.0, total) : std::pow(std::max(0.0, total), 1.0 / q);
}

double bottleneck_pd(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    const std::size_t m = a.points.size();
    const std::size_t n = b.points.size();
    if (m == 0 && n == 0) {
        return 0.0;
    }

    std::vector<double> candidates{0.0};
    for (const DiagramPoint& pa : a.points) {
        candidates.push_back(diagonal_cost(pa));
        for (const DiagramPoint& pb : b.points) {
            candidates.push_back(linf(pa, pb));
        }
    }
    for (const DiagramPoint& pb : b.points) {
        candidates.push_back(diagonal_cost(pb));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const std::size_t size = m + n;
    auto feasible = [&](double c) {
        // Left side: a-points then n diagonal slots; right side symmetric.
        std::vector<std::vector<int>> adjacency(size);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (linf(a.points[i], b.points[j]) <= c) {
                    adjacency[i].push_back(static_cast<int>(j));
                }
            }
            if (diagonal_cost(a.points[i]) <= c) {
                for (std::size_t j = n; j < size; ++j) {
                    adjacency[i].push_back(static_cast<int>(j));
                }
            }
        }
        for (std::size_t i = m; i < size; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (diagonal_cost(b.points[j]) <= c) {
                    adjacency[i].push_back(static_cast<int>(j));
                }
            }
            for (std::size_t j = n; j < size; ++j) {
                adjacency[i].push_back(static_cast<int>(j));
            }
        }
        return detail::has_perfect_matching(adjacency, static_cast<int>(size));
    };

    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(candidates[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return candidates[lo];
}

double pd_distance(const ProbMap& pred, const BinaryMask& ground_truth,
                   const DiagramDistanceConfig& cfg) {
    if (!same_shape(pred, ground_truth)) {
        throw std::invalid_argument("pd_distance: prediction and mask shapes differ");
    }
    const PersistenceDiagram da = h0_superlevel_diagram(pred);
    const PersistenceDiagram db = diagram_of_mask(ground_truth);
    if (cfg.kind == DiagramDistanceKind::bottleneck) {
        return bottleneck_pd(da, db);
    }
    return wasserstein_pd(da, db, cfg.q);
}

std::string diagram_to_json(const PersistenceDiagram& d) {
    PersistenceDiagram sorted = d;
    sorted.sort_canonical();
    nlohmann::json arr = nlohmann::json::array();
    for (const DiagramPoint& p : sorted.points) {
        arr.push_back({p.birth, p.death});
    }
    return arr.dump();
}

PersistenceDiagram diagram_from_json(std::string_view text) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) {
        throw std::invalid_argument("diagram JSON must be an array of [birth, death] pairs");
    }
    PersistenceDiagram d;
    for (const auto& item : arr) {
        if (!item.is_array() || item.size() != 2) {
            throw std::invalid_argument("diagram JSON entries must be [birth, death] pairs");
        }
        const double birth = item[0].get<double>();
        const double death = item[1].get<double>();
        if (!(birth >= death) || birth > 1.0 || death < 0.0) {
            throw std::invalid_argument("diagram point violates birth >= death in [0,1]");
        }
        d.points.push_back(DiagramPoint{birth, death});
    }
    d.sort_canonical();
    return d;
}

}  // namespace toposeg
