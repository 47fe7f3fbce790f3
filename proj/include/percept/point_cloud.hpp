#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace percept {

// Finite set of points in d-dimensional Euclidean space, stored row-major.
// Also doubles as a generic row matrix (e.g. a multivariate time series with
// one row per time step).
class PointCloud {
public:
    PointCloud() = default;
    explicit PointCloud(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    bool empty() const { return coords_.empty(); }

    std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }

    void push_back(std::span<const double> p) {
        if (dim_ == 0) dim_ = p.size();
        if (p.size() != dim_)
            throw std::invalid_argument("PointCloud: inconsistent point dimension");
        coords_.insert(coords_.end(), p.begin(), p.end());
    }
    void push_back(std::initializer_list<double> p) {
        push_back(std::span<const double>(p.begin(), p.size()));
    }

    const std::vector<double>& data() const { return coords_; }
    std::vector<double>& data() { return coords_; }

    bool all_finite() const {
        for (double c : coords_)
            if (!std::isfinite(c)) return false;
        return true;
    }

private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

}  // namespace percept
