#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "percept/binning.hpp"
#include "percept/detector.hpp"
#include "percept/lower_star.hpp"
#include "percept/pca.hpp"
#include "percept/persistence.hpp"
#include "percept/point_cloud.hpp"
#include "percept/rips.hpp"

namespace percept {

struct FiltrationConfig {
    enum class Kind { rips, lower_star };
    Kind kind = Kind::rips;
    double max_radius = 1.5;
    int max_dim = 1;
};

// Essential-class handling per homology dimension.
struct EssentialConfig {
    EssentialPolicy h0 = EssentialPolicy::drop();
    EssentialPolicy h1 = EssentialPolicy::drop();
};

inline PersistenceDiagram diagram_for_cloud(const PointCloud& cloud,
                                            const FiltrationConfig& cfg) {
    return compute_persistence(build_rips_filtration(cloud, cfg.max_radius, cfg.max_dim));
}

inline PersistenceDiagram diagram_for_image(const ImageGrid& image) {
    return compute_persistence(build_lower_star_filtration(image));
}

inline std::vector<PersistenceDiagram> diagrams_for_clouds(std::span<const PointCloud> frames,
                                                           const FiltrationConfig& cfg) {
    std::vector<PersistenceDiagram> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(diagram_for_cloud(f, cfg));
    return out;
}

// Splits the diagram by dimension, applies that dimension's essential
// policy, and merges the tilted features back together.
inline TiltedDiagram tilt_with_config(const PersistenceDiagram& diagram,
                                      const EssentialConfig& cfg) {
    TiltedDiagram out;
    for (int dim : {0, 1}) {
        PersistenceDiagram part;
        for (const auto& f : diagram.features)
            if (f.dim == dim) part.features.push_back(f);
        auto tilted = tilt(part, dim == 0 ? cfg.h0 : cfg.h1);
        out.features.insert(out.features.end(), tilted.features.begin(), tilted.features.end());
    }
    return out;
}

inline std::vector<TiltedDiagram> tilt_stream(std::span<const PersistenceDiagram> diagrams,
                                              const EssentialConfig& cfg) {
    std::vector<TiltedDiagram> out;
    out.reserve(diagrams.size());
    for (const auto& d : diagrams) out.push_back(tilt_with_config(d, cfg));
    return out;
}

inline std::vector<std::vector<double>> bin_stream(std::span<const TiltedDiagram> tilted,
                                                   const Partition& partition) {
    std::vector<std::vector<double>> out;
    out.reserve(tilted.size());
    for (const auto& d : tilted) out.push_back(bin_diagram(d, partition).f);
    return out;
}

// Partition fitting request: either equal-width/equal-mass histogram bins or
// k-means Voronoi persistence clusters.
struct PartitionSpec {
    enum class Kind { histogram_equal_width, histogram_equal_mass, voronoi };
    Kind kind = Kind::voronoi;
    int bins = 10;      // histogram bins per dimension
    int k_pre = 3;
    int k_post = 3;
    std::vector<int> dims{0};
};

// Fits the partition on training tilted diagrams. Voronoi mode requires
// post-change training data; histogram modes use only the pre-change side.
inline Partition fit_partition(const PartitionSpec& spec,
                               std::span<const TiltedDiagram> training_pre,
                               std::span<const TiltedDiagram> training_post,
                               std::uint64_t seed) {
    switch (spec.kind) {
        case PartitionSpec::Kind::histogram_equal_width:
            return make_equal_width_bins(training_pre, spec.bins, spec.dims);
        case PartitionSpec::Kind::histogram_equal_mass:
            if (training_pre.empty())
                throw std::invalid_argument("fit_partition: no pre-change training diagrams");
            return make_equal_mass_bins(training_pre.front(), spec.bins, spec.dims);
        case PartitionSpec::Kind::voronoi:
            if (training_post.empty())
                throw std::invalid_argument(
                    "fit_partition: voronoi mode requires post-change training diagrams");
            return fit_persistence_clusters(training_pre, training_post, spec.k_pre,
                                            spec.k_post, seed, spec.dims);
    }
    throw std::logic_error("fit_partition: unreachable");
}

// Row-major flattening of a point cloud (the vectorization the Hotelling and
// MMD baselines consume).
inline Eigen::VectorXd vectorize_cloud(const PointCloud& cloud) {
    Eigen::VectorXd v(cloud.data().size());
    for (std::size_t i = 0; i < cloud.data().size(); ++i) v(i) = cloud.data()[i];
    return v;
}

inline Eigen::MatrixXd vectorize_clouds(std::span<const PointCloud> frames) {
    if (frames.empty()) throw std::invalid_argument("vectorize_clouds: no frames");
    const auto cols = frames.front().data().size();
    Eigen::MatrixXd rows(frames.size(), cols);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        if (frames[t].data().size() != cols)
            throw std::invalid_argument("vectorize_clouds: inconsistent frame sizes");
        rows.row(t) = vectorize_cloud(frames[t]).transpose();
    }
    return rows;
}

inline Eigen::MatrixXd vectorize_images(std::span<const ImageGrid> frames) {
    if (frames.empty()) throw std::invalid_argument("vectorize_images: no frames");
    const auto cols = frames.front().values.size();
    Eigen::MatrixXd rows(frames.size(), cols);
    for (std::size_t t = 0; t < frames.size(); ++t) {
        if (frames[t].values.size() != cols)
            throw std::invalid_argument("vectorize_images: inconsistent image sizes");
        for (std::size_t i = 0; i < cols; ++i) rows(t, i) = frames[t].values[i];
    }
    return rows;
}

// Mean frequency vector of a pool, normalized to a distribution. Used as the
// estimated persistence distribution p-hat.
inline std::vector<double> pool_distribution(std::span<const std::vector<double>> pool) {
    if (pool.empty()) throw std::invalid_argument("pool_distribution: empty pool");
    std::vector<double> mean(pool.front().size(), 0.0);
    for (const auto& f : pool)
        for (std::size_t l = 0; l < mean.size(); ++l) mean[l] += f[l];
    double total = 0.0;
    for (double v : mean) total += v;
    if (total <= 0.0) throw std::invalid_argument("pool_distribution: zero total mass");
    for (auto& v : mean) v /= total;
    return mean;
}

}  // namespace percept
