#pragma once

// Internal matching solvers for persistence-diagram distances.

#include <vector>

namespace toposeg::detail {

/// Minimal total cost of a perfect matching on a square cost matrix
/// (Hungarian algorithm with potentials, O(n^3)).
double solve_assignment(const std::vector<std::vector<double>>& cost);

/// True when the bipartite graph given as adjacency lists (left index ->
/// right indices) admits a matching saturating every left vertex.
/// Left and right sides must have equal size. Hopcroft-Karp.
bool has_perfect_matching(const std::vector<std::vector<int>>& adjacency, int right_size);

}  // namespace toposeg::detail
