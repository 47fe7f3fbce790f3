#pragma once

#include <stdexcept>
#include <vector>

#include "percept/point_cloud.hpp"
#include "percept/simplex.hpp"

namespace percept {

// Vietoris-Rips filtration of a point cloud. Vertices enter at 0, an edge at
// the Euclidean distance of its endpoints, a triangle at its largest pairwise
// distance (diameter convention). Simplices beyond max_radius are not built.
inline Filtration build_rips_filtration(const PointCloud& points, double max_radius,
                                        int max_dim = 2) {
    if (points.empty())
        throw std::invalid_argument("build_rips_filtration: empty point cloud");
    if (!points.all_finite())
        throw std::invalid_argument("build_rips_filtration: non-finite coordinates");
    if (!(max_radius > 0.0))
        throw std::invalid_argument("build_rips_filtration: max_radius must be positive");
    if (max_dim != 1 && max_dim != 2)
        throw std::invalid_argument("build_rips_filtration: max_dim must be 1 or 2");

    const int n = static_cast<int>(points.size());
    Filtration f;
    f.entries.reserve(static_cast<std::size_t>(n) * 2);

    for (int i = 0; i < n; ++i)
        f.entries.push_back({Simplex::vertex(i), 0.0});

    // Pairwise distances; kept for the triangle pass.
    std::vector<double> dist;
    if (max_dim == 2) dist.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = euclidean_distance(points[i], points[j]);
            if (max_dim == 2) {
                dist[static_cast<std::size_t>(i) * n + j] = d;
                dist[static_cast<std::size_t>(j) * n + i] = d;
            }
            if (d <= max_radius)
                f.entries.push_back({Simplex::edge(i, j), d});
        }
    }

    if (max_dim == 2) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double dij = dist[static_cast<std::size_t>(i) * n + j];
                if (dij > max_radius) continue;
                for (int k = j + 1; k < n; ++k) {
                    const double dik = dist[static_cast<std::size_t>(i) * n + k];
                    if (dik > max_radius) continue;
                    const double djk = dist[static_cast<std::size_t>(j) * n + k];
                    if (djk > max_radius) continue;
                    const double v = std::max(dij, std::max(dik, djk));
                    f.entries.push_back({Simplex::triangle(i, j, k), v});
                }
            }
        }
    }

    sort_filtration(f);
    return f;
}

}  // namespace percept
