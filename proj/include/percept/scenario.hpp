#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "percept/point_cloud.hpp"
#include "percept/rng.hpp"

namespace percept {

enum class ScenarioKind { shape_change, noise_change };

// Synthetic stream of noisy samples from a (hyper)ellipsoid surface whose
// shape and/or noise level switches at the change frame.
struct Scenario {
    ScenarioKind kind = ScenarioKind::noise_change;
    std::vector<double> pre_axes;   // semi-axes, length = ambient dimension
    std::vector<double> post_axes;
    double sigma_pre = 0.05;
    double sigma_post = 0.10;
    int frames = 400;
    int change_at = 200;            // last pre-change frame t*
    int points_per_frame = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (pre_axes.size() < 2 || post_axes.size() != pre_axes.size())
            throw std::invalid_argument("Scenario: axes must share a dimension of at least 2");
        for (double a : pre_axes)
            if (!(a > 0.0)) throw std::invalid_argument("Scenario: axes must be positive");
        for (double a : post_axes)
            if (!(a > 0.0)) throw std::invalid_argument("Scenario: axes must be positive");
        if (!(sigma_pre >= 0.0) || !(sigma_post >= 0.0))
            throw std::invalid_argument("Scenario: noise levels must be nonnegative");
        if (frames < 1 || change_at < 1 || change_at > frames)
            throw std::invalid_argument("Scenario: need 1 <= t* <= T");
        if (points_per_frame < 1)
            throw std::invalid_argument("Scenario: need at least one point per frame");
        if (kind == ScenarioKind::noise_change && pre_axes != post_axes)
            throw std::invalid_argument("Scenario: noise_change keeps the geometry fixed");
    }
};

// n points uniform on the unit sphere direction (normalized Gaussians),
// scaled per axis, plus isotropic N(0, sigma^2) noise per coordinate. For
// unequal axes the surface measure is not uniform; the detector consumes
// topology, not measure, so this is the documented sampling scheme.
inline PointCloud sample_shape(std::span<const double> axes, int n, double sigma,
                               std::mt19937_64& rng) {
    if (n < 1) throw std::invalid_argument("sample_shape: need n >= 1");
    const std::size_t d = axes.size();
    std::normal_distribution<double> gauss(0.0, 1.0);
    PointCloud cloud(d);
    std::vector<double> p(d);
    for (int i = 0; i < n; ++i) {
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                p[k] = gauss(rng);
                norm += p[k] * p[k];
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        for (std::size_t k = 0; k < d; ++k) p[k] = axes[k] * p[k] / norm;
        if (sigma > 0.0)
            for (std::size_t k = 0; k < d; ++k) p[k] += sigma * gauss(rng);
        cloud.push_back(std::span<const double>(p.data(), p.size()));
    }
    return cloud;
}

// Frames 1..t* from the pre-change configuration, t*+1..T post-change.
// Each frame draws from its own derived seed, so streams are reproducible
// and frame generation could run in any order.
inline std::vector<PointCloud> generate_scenario(const Scenario& sc) {
    sc.validate();
    std::vector<PointCloud> frames;
    frames.reserve(sc.frames);
    for (int t = 1; t <= sc.frames; ++t) {
        auto rng = make_rng(sc.seed, "frame", static_cast<std::uint64_t>(t));
        const bool pre = t <= sc.change_at;
        frames.push_back(sample_shape(pre ? sc.pre_axes : sc.post_axes, sc.points_per_frame,
                                      pre ? sc.sigma_pre : sc.sigma_post, rng));
    }
    return frames;
}

// Named geometries from the experiment configurations.
inline std::vector<double> geometry_axes(const std::string& name, int dim) {
    if (dim < 2) throw std::invalid_argument("geometry_axes: dimension must be at least 2");
    if (name == "circle" || name == "sphere") return std::vector<double>(dim, 1.0);
    if (name == "ellipse" || name == "ellipsoid") {
        std::vector<double> axes(dim, 1.0);
        axes[0] = 2.0;
        return axes;
    }
    throw std::invalid_argument("geometry_axes: unknown geometry '" + name + "'");
}

}  // namespace percept
