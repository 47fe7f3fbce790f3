#pragma once

#include <stdexcept>

#include "percept/point_cloud.hpp"

namespace percept {

// Sliding-window embedding of a multivariate series: the window of raw
// cross-section vectors z_{t-w+1}, ..., z_t treated as a point cloud in R^d.
// The series is a row matrix with one d-dimensional row per time step;
// indices are 0-based.
inline PointCloud takens_embed(const PointCloud& series, int window, int t) {
    if (window < 1) throw std::invalid_argument("takens_embed: window must be positive");
    if (t >= static_cast<int>(series.size()))
        throw std::invalid_argument("takens_embed: time index past end of series");
    if (t < window - 1)
        throw std::invalid_argument("takens_embed: insufficient history before t");
    PointCloud out(series.dim());
    for (int i = t - window + 1; i <= t; ++i) out.push_back(series[i]);
    return out;
}

}  // namespace percept
