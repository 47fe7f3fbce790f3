#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "percept/rng.hpp"

namespace percept {

struct KMeansResult {
    std::vector<std::array<double, 2>> centers;
    std::vector<int> assignment;
    double inertia = 0.0;
};

namespace detail {

inline double sq_dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

inline int nearest_center(const std::array<double, 2>& p,
                          std::span<const std::array<double, 2>> centers) {
    int best = 0;
    double best_d = sq_dist2(p, centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        const double d = sq_dist2(p, centers[c]);
        if (d < best_d) {  // strict comparison keeps the smaller index on ties
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace detail

// Lloyd's algorithm with k-means++ seeding. Runs `restarts` independent
// initialisations and keeps the lowest-inertia solution; deterministic for a
// fixed seed.
inline KMeansResult kmeans_2d(std::span<const std::array<double, 2>> points, int k,
                              std::uint64_t seed, int restarts = 10, int max_iter = 100,
                              double rel_tol = 1e-8) {
    const int n = static_cast<int>(points.size());
    if (k < 1) throw std::invalid_argument("kmeans_2d: k must be positive");
    if (n < k) throw std::invalid_argument("kmeans_2d: fewer points than clusters");

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < restarts; ++restart) {
        auto rng = make_rng(seed, "kmeans", static_cast<std::uint64_t>(restart));

        // k-means++ initialisation
        std::vector<std::array<double, 2>> centers;
        centers.reserve(k);
        std::uniform_int_distribution<int> first(0, n - 1);
        centers.push_back(points[first(rng)]);
        std::vector<double> d2(n);
        while (static_cast<int>(centers.size()) < k) {
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                double m = std::numeric_limits<double>::infinity();
                for (const auto& c : centers) m = std::min(m, detail::sq_dist2(points[i], c));
                d2[i] = m;
                total += m;
            }
            int chosen;
            if (total <= 0.0) {
                std::uniform_int_distribution<int> any(0, n - 1);
                chosen = any(rng);
            } else {
                std::uniform_real_distribution<double> u(0.0, total);
                double target = u(rng), acc = 0.0;
                chosen = n - 1;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= target) {
                        chosen = i;
                        break;
                    }
                }
            }
            centers.push_back(points[chosen]);
        }

        std::vector<int> assignment(n, -1);
        double inertia = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < max_iter; ++iter) {
            double new_inertia = 0.0;
            for (int i = 0; i < n; ++i) {
                assignment[i] = detail::nearest_center(points[i], centers);
                new_inertia += detail::sq_dist2(points[i], centers[assignment[i]]);
            }
            std::vector<std::array<double, 2>> sums(k, {0.0, 0.0});
            std::vector<int> counts(k, 0);
            for (int i = 0; i < n; ++i) {
                sums[assignment[i]][0] += points[i][0];
                sums[assignment[i]][1] += points[i][1];
                ++counts[assignment[i]];
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    // re-seed an emptied cluster at the point farthest from
                    // its current center
                    int far = 0;
                    double far_d = -1.0;
                    for (int i = 0; i < n; ++i) {
                        const double d = detail::sq_dist2(points[i], centers[assignment[i]]);
                        if (d > far_d) {
                            far_d = d;
                            far = i;
                        }
                    }
                    centers[c] = points[far];
                } else {
                    centers[c] = {sums[c][0] / counts[c], sums[c][1] / counts[c]};
                }
            }
            if (new_inertia <= inertia &&
                (inertia - new_inertia) <= rel_tol * std::max(inertia, 1e-300)) {
                inertia = new_inertia;
                break;
            }
            inertia = new_inertia;
        }
        // final assignment/inertia for the converged centers
        double final_inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            assignment[i] = detail::nearest_center(points[i], centers);
            final_inertia += detail::sq_dist2(points[i], centers[assignment[i]]);
        }
        if (final_inertia < best.inertia) {
            best.centers = centers;
            best.assignment = assignment;
            best.inertia = final_inertia;
        }
    }
    return best;
}

}  // namespace percept
