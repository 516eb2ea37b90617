#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toposeg/grids.hpp"

namespace toposeg {

/// One H0 feature of a superlevel filtration: born when the threshold drops
/// to `birth`, dead when it drops to `death`; birth >= death, both in [0,1].
struct DiagramPoint {
    double birth = 0.0;
    double death = 0.0;

    double persistence() const { return birth - death; }

    bool operator==(const DiagramPoint&) const = default;
};

/// Multiset of (birth, death) pairs. Kept in canonical order (descending
/// persistence, then descending birth, then descending death) so that
/// serialization and comparisons are deterministic.
struct PersistenceDiagram {
    std::vector<DiagramPoint> points;

    void sort_canonical();
    bool operator==(const PersistenceDiagram&) const = default;
};

enum class DiagramDistanceKind { wasserstein, bottleneck };

struct DiagramDistanceConfig {
    DiagramDistanceKind kind = DiagramDistanceKind::wasserstein;
    double q = 1.0;  // Wasserstein order, ignored for bottleneck
};

/// H0 persistence of the superlevel filtration {p >= t} under 4-connectivity.
/// Components are born at their maximum pixel value; on a merge the
/// lower-birth component dies at the merge threshold (elder rule); essential
/// components die at 0. Pixels of equal value are processed in raster order
/// and zero-persistence pairs are dropped, so plateaus form single components.
PersistenceDiagram h0_superlevel_diagram(const ProbMap& p);

/// Ground-truth diagram of a binary mask: one (1, 0) point per 4-connected
/// foreground component. Identical to h0_superlevel_diagram of the indicator.
PersistenceDiagram diagram_of_mask(const BinaryMask& mask);

/// Order-q Wasserstein distance with L-infinity ground metric. Unmatched
/// points pay their distance to the diagonal, (birth - death)/2. Exact, via
/// an assignment solve on the diagonal-padded cost matrix.
double wasserstein_pd(const PersistenceDiagram& a, const PersistenceDiagram& b, double q);

/// Bottleneck distance: minimal over matchings of the largest matched or
/// diagonal L-infinity cost. Exact, via binary search over candidate costs
/// with a bipartite feasibility check.
double bottleneck_pd(const PersistenceDiagram& a, const PersistenceDiagram& b);

/// Diagram distance between a prediction's superlevel H0 diagram and the
/// ground-truth mask diagram.
double pd_distance(const ProbMap& pred, const BinaryMask& ground_truth,
                   const DiagramDistanceConfig& cfg = {});

/// JSON array of [birth, death] pairs in canonical order.
std::string diagram_to_json(const PersistenceDiagram& d);
PersistenceDiagram diagram_from_json(std::string_view text);

}  // namespace toposeg
