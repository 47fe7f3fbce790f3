#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "percept/persistence.hpp"

namespace percept {
namespace detail {

inline constexpr double kInfCost = 1e18;

// Min-cost perfect assignment on an n x n cost matrix (row-major), O(n^3)
// Hungarian algorithm with potentials.
inline double hungarian(const std::vector<double>& cost, int n) {
    if (n == 0) return 0.0;
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInfCost);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInfCost;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) total += cost[(p[j] - 1) * n + (j - 1)];
    return total;
}

struct DistPoint {
    double birth;
    double death;
};

inline std::vector<DistPoint> finite_points(const PersistenceDiagram& d, int dim) {
    std::vector<DistPoint> out;
    for (const Feature& f : d.features)
        if (f.dim == dim && !f.essential()) out.push_back({f.birth, f.death});
    return out;
}

inline double linf(const DistPoint& a, const DistPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// Kuhn augmenting-path matching over the diagram/diagonal bipartite graph.
// Left nodes: points of A, then one diagonal slot per point of B. Right
// nodes: points of B, then one diagonal slot per point of A. The bottleneck
// distance is at most eps iff this graph has a perfect matching.
inline bool bottleneck_feasible(const std::vector<DistPoint>& a, const std::vector<DistPoint>& b,
                                double eps) {
    const int n1 = static_cast<int>(a.size());
    const int n2 = static_cast<int>(b.size());
    const int total = n1 + n2;
    std::vector<int> match_right(total, -1);
    std::vector<char> visited(total, 0);

    auto neighbors = [&](int left, std::vector<int>& out) {
        out.clear();
        if (left < n1) {
            for (int j = 0; j < n2; ++j)
                if (linf(a[left], b[j]) <= eps) out.push_back(j);
            if (a[left].death - a[left].birth <= 2.0 * eps) out.push_back(n2 + left);
        } else {
            const int j = left - n1;  // diagonal slot of b[j]
            if (b[j].death - b[j].birth <= 2.0 * eps) out.push_back(j);
            for (int t = 0; t < n1; ++t) out.push_back(n2 + t);  // diagonal-diagonal
        }
    };

    auto try_kuhn = [&](auto&& self, int left) -> bool {
        std::vector<int> local;
        neighbors(left, local);
        for (int r : local) {
            if (visited[r]) continue;
            visited[r] = 1;
            if (match_right[r] < 0 || self(self, match_right[r])) {
                match_right[r] = left;
                return true;
            }
        }
        return false;
    };

    for (int left = 0; left < total; ++left) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!try_kuhn(try_kuhn, left)) return false;
    }
    return true;
}

inline double bottleneck_single_dim(const std::vector<DistPoint>& a,
                                    const std::vector<DistPoint>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::vector<double> candidates{0.0};
    for (const auto& p : a) candidates.push_back(0.5 * (p.death - p.birth));
    for (const auto& q : b) candidates.push_back(0.5 * (q.death - q.birth));
    for (const auto& p : a)
        for (const auto& q : b) candidates.push_back(linf(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    int lo = 0, hi = static_cast<int>(candidates.size()) - 1;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (bottleneck_feasible(a, b, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return candidates[lo];
}

inline double wasserstein1_single_dim(const std::vector<DistPoint>& a,
                                      const std::vector<DistPoint>& b) {
    const int n1 = static_cast<int>(a.size());
    const int n2 = static_cast<int>(b.size());
    const int n = n1 + n2;
    if (n == 0) return 0.0;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

    std::vector<double> cost(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double db = a[i].birth - b[j].birth;
            const double dd = a[i].death - b[j].death;
            cost[static_cast<std::size_t>(i) * n + j] = std::sqrt(db * db + dd * dd);
        }
        for (int t = 0; t < n1; ++t)
            cost[static_cast<std::size_t>(i) * n + n2 + t] =
                (t == i) ? (a[i].death - a[i].birth) * inv_sqrt2 : kInfCost;
    }
    for (int s = 0; s < n2; ++s) {
        for (int j = 0; j < n2; ++j)
            cost[static_cast<std::size_t>(n1 + s) * n + j] =
                (j == s) ? (b[s].death - b[s].birth) * inv_sqrt2 : kInfCost;
        // diagonal-to-diagonal mass moves for free
    }
    return hungarian(cost, n);
}

inline std::vector<int> dims_present(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    std::vector<int> dims;
    for (int d : {0, 1}) {
        bool present = false;
        for (const Feature& f : a.features)
            if (f.dim == d && !f.essential()) present = true;
        for (const Feature& f : b.features)
            if (f.dim == d && !f.essential()) present = true;
        if (present) dims.push_back(d);
    }
    return dims;
}

}  // namespace detail

// Bottleneck distance between the finite features of two untilted diagrams:
// the smallest eps admitting a perfect matching where points may also pair
// with the diagonal at L-inf cost (death - birth) / 2. Computed per homology
// dimension; without an explicit dimension the maximum over dimensions is
// returned. Essential classes are excluded.
inline double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                  std::optional<int> dim = std::nullopt) {
    if (dim) {
        return detail::bottleneck_single_dim(detail::finite_points(a, *dim),
                                             detail::finite_points(b, *dim));
    }
    double best = 0.0;
    for (int d : detail::dims_present(a, b))
        best = std::max(best,
                        detail::bottleneck_single_dim(detail::finite_points(a, d),
                                                      detail::finite_points(b, d)));
    return best;
}

// Order-1 optimal transport cost between diagrams with diagonal projections
// as slack points and Euclidean ground metric, solved exactly by assignment
// on the padded cost matrix. Per dimension; aggregate is the sum.
inline double wasserstein1_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                    std::optional<int> dim = std::nullopt) {
    if (dim) {
        return detail::wasserstein1_single_dim(detail::finite_points(a, *dim),
                                               detail::finite_points(b, *dim));
    }
    double total = 0.0;
    for (int d : detail::dims_present(a, b))
        total += detail::wasserstein1_single_dim(detail::finite_points(a, d),
                                                 detail::finite_points(b, d));
    return total;
}

}  // namespace percept
