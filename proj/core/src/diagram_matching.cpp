#include "diagram_matching.hpp"

#include <functional>
#include <limits>
#include <queue>

namespace toposeg::detail {

double solve_assignment(const std::vector<std::vector<double>>& cost) {
    // Hungarian algorithm in the potentials formulation, 1-indexed scratch
    // arrays, O(n^3). Rows are assigned one at a time via shortest
    // augmenting paths in the reduced-cost graph.
    const int n = static_cast<int>(cost.size());
    if (n == 0) {
        return 0.0;
    }
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        std::vector<int> way(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        total += cost[match[j] - 1][j - 1];
    }
    return total;
}

bool has_perfect_matching(const std::vector<std::vector<int>>& adjacency, int right_size) {
    // Hopcroft-Karp. Vertices are 0-based; 0 on the distance axis plays the
    // role of the usual NIL sentinel via matchL/matchR = -1.
    const int left_size = static_cast<int>(adjacency.size());
    if (left_size != right_size) {
        return false;
    }
    std::vector<int> match_left(left_size, -1), match_right(right_size, -1);
    std::vector<int> dist(left_size, 0);
    const int inf = std::numeric_limits<int>::max();

    auto bfs = [&]() {
        std::queue<int> q;
        bool found_free_right = false;
        for (int ul = 0; ul < left_size; ++ul) {
            if (match_left[ul] == -1) {
                dist[ul] = 0;
                q.push(ul);
            } else {
                dist[ul] = inf;
            }
        }
        while (!q.empty()) {
            const int ul = q.front();
            q.pop();
            for (int vr : adjacency[ul]) {
                const int next = match_right[vr];
                if (next == -1) {
                    found_free_right = true;
                } else if (dist[next] == inf) {
                    dist[next] = dist[ul] + 1;
                    q.push(next);
                }
            }
        }
        return found_free_right;
    };

    std::function<bool(int)> dfs = [&](int ul) {
        for (int vr : adjacency[ul]) {
            const int next = match_right[vr];
            if (next == -1 || (dist[next] == dist[ul] + 1 && dfs(next))) {
                match_left[ul] = vr;
                match_right[vr] = ul;
                return true;
            }
        }
        dist[ul] = inf;
        return false;
    };

    int matched = 0;
    while (bfs()) {
        for (int ul = 0; ul < left_size; ++ul) {
            if (match_left[ul] == -1 && dfs(ul)) {
                ++matched;
            }
        }
    }
    return matched == left_size;
}

}  // namespace toposeg::detail
