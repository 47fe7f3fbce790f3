#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "percept/kmeans.hpp"
#include "percept/persistence.hpp"

namespace percept {

// Equal-width or equal-mass breakpoints over the birth axis, held separately
// per homology dimension and concatenated into one frequency vector.
struct HistogramBins {
    std::vector<int> dims;                           // homology dimensions, ascending
    std::vector<std::vector<double>> breakpoints;    // right breakpoints per dim

    std::size_t total_bins() const {
        std::size_t n = 0;
        for (const auto& b : breakpoints) n += b.size();
        return n;
    }
};

// Voronoi cells in tilted (birth, persistence) space induced by k-means
// centers; features of the selected dimensions are pooled.
struct VoronoiPartition {
    std::vector<int> dims;
    std::vector<std::array<double, 2>> centers;

    std::size_t total_bins() const { return centers.size(); }
};

using Partition = std::variant<HistogramBins, VoronoiPartition>;

inline std::size_t partition_bins(const Partition& p) {
    return std::visit([](const auto& q) { return q.total_bins(); }, p);
}

// Frequency vector f (summed persistences per cell) and proportion vector
// omega = f / sum(f). An empty diagram yields f = 0 and uniform omega,
// flagged via empty_diagram.
struct PersistenceHistogram {
    std::vector<double> f;
    std::vector<double> omega;
    bool empty_diagram = false;
};

namespace detail {

inline bool dim_selected(std::span<const int> dims, int d) {
    return std::find(dims.begin(), dims.end(), d) != dims.end();
}

inline std::vector<std::array<double, 2>> pooled_tilted_points(
    std::span<const TiltedDiagram> diagrams, std::span<const int> dims) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& d : diagrams)
        for (const auto& f : d.features)
            if (dim_selected(dims, f.dim)) pts.push_back({f.birth, f.persistence});
    return pts;
}

}  // namespace detail

// Equal-width bins over [0, max reference birth] per homology dimension; the
// last breakpoint gets a small margin so the extreme birth still falls in
// bin L. Births beyond the margin clamp into the last bin at binning time.
inline HistogramBins make_equal_width_bins(std::span<const TiltedDiagram> reference,
                                           int bins_per_dim,
                                           std::span<const int> dims) {
    if (bins_per_dim < 2)
        throw std::invalid_argument("make_equal_width_bins: need at least 2 bins");
    if (dims.empty()) throw std::invalid_argument("make_equal_width_bins: no dimensions");
    HistogramBins out;
    for (int d : dims) {
        double max_birth = -1.0;
        for (const auto& diagram : reference)
            for (const auto& f : diagram.features)
                if (f.dim == d) max_birth = std::max(max_birth, f.birth);
        if (max_birth < 0.0)
            throw std::invalid_argument(
                "make_equal_width_bins: reference diagrams have no features in a selected "
                "dimension");
        std::vector<double> breaks(bins_per_dim);
        const double top = max_birth > 0.0 ? max_birth : 1.0;
        for (int l = 0; l < bins_per_dim; ++l) breaks[l] = top * (l + 1) / bins_per_dim;
        breaks.back() += 1e-9;
        out.dims.push_back(d);
        out.breakpoints.push_back(std::move(breaks));
    }
    return out;
}

// Breakpoints chosen by a greedy sweep over births in ascending order so each
// bin collects roughly total persistence / L; a bin closes once its running
// sum reaches the next multiple of the target. Requires at least L features
// with distinct births in every selected dimension.
inline HistogramBins make_equal_mass_bins(const TiltedDiagram& reference, int bins_per_dim,
                                          std::span<const int> dims) {
    if (bins_per_dim < 2)
        throw std::invalid_argument("make_equal_mass_bins: need at least 2 bins");
    HistogramBins out;
    for (int d : dims) {
        std::vector<std::pair<double, double>> feats;  // (birth, persistence)
        for (const auto& f : reference.features)
            if (f.dim == d) feats.emplace_back(f.birth, f.persistence);
        std::sort(feats.begin(), feats.end());
        double total = 0.0;
        for (auto& [b, v] : feats) total += v;
        if (feats.empty() || total <= 0.0)
            throw std::invalid_argument("make_equal_mass_bins: reference has no persistence");
        if (static_cast<int>(feats.size()) < bins_per_dim)
            throw std::invalid_argument("make_equal_mass_bins: fewer features than bins");

        std::vector<double> breaks;
        const double target = total / bins_per_dim;
        double acc = 0.0;
        int closed = 0;
        for (std::size_t i = 0; i + 1 < feats.size() && closed < bins_per_dim - 1; ++i) {
            acc += feats[i].second;
            const std::size_t remaining = feats.size() - i - 1;
            // bins still to close after this one; force a close when exactly
            // enough features remain to keep them all nonempty
            const int open = bins_per_dim - closed - 1;
            if (acc >= target * (closed + 1) || remaining <= static_cast<std::size_t>(open)) {
                // cut midway to the next distinct birth; equal births defer
                if (feats[i + 1].first > feats[i].first) {
                    breaks.push_back(0.5 * (feats[i].first + feats[i + 1].first));
                    ++closed;
                }
            }
        }
        if (closed != bins_per_dim - 1)
            throw std::invalid_argument("make_equal_mass_bins: too few distinct births");
        breaks.push_back(feats.back().first + 1e-9);
        out.dims.push_back(d);
        out.breakpoints.push_back(std::move(breaks));
    }
    return out;
}

inline PersistenceHistogram bin_diagram(const TiltedDiagram& diagram,
                                        const HistogramBins& bins) {
    const std::size_t L = bins.total_bins();
    if (L == 0) throw std::invalid_argument("bin_diagram: empty partition");
    PersistenceHistogram h;
    h.f.assign(L, 0.0);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < bins.dims.size(); ++k) {
        const auto& breaks = bins.breakpoints[k];
        for (const auto& f : diagram.features) {
            if (f.dim != bins.dims[k]) continue;
            auto it = std::upper_bound(breaks.begin(), breaks.end(), f.birth);
            std::size_t idx = static_cast<std::size_t>(it - breaks.begin());
            if (idx >= breaks.size()) idx = breaks.size() - 1;  // clamp into last bin
            h.f[offset + idx] += f.persistence;
        }
        offset += breaks.size();
    }
    double total = 0.0;
    for (double v : h.f) total += v;
    if (total > 0.0) {
        h.omega.resize(L);
        for (std::size_t l = 0; l < L; ++l) h.omega[l] = h.f[l] / total;
    } else {
        h.omega.assign(L, 1.0 / static_cast<double>(L));
        h.empty_diagram = true;
    }
    return h;
}

inline PersistenceHistogram bin_diagram(const TiltedDiagram& diagram,
                                        const VoronoiPartition& partition) {
    const std::size_t L = partition.centers.size();
    if (L == 0) throw std::invalid_argument("bin_diagram: empty partition");
    PersistenceHistogram h;
    h.f.assign(L, 0.0);
    for (const auto& f : diagram.features) {
        if (!detail::dim_selected(partition.dims, f.dim)) continue;
        const std::array<double, 2> p{f.birth, f.persistence};
        h.f[detail::nearest_center(p, partition.centers)] += f.persistence;
    }
    double total = 0.0;
    for (double v : h.f) total += v;
    if (total > 0.0) {
        h.omega.resize(L);
        for (std::size_t l = 0; l < L; ++l) h.omega[l] = h.f[l] / total;
    } else {
        h.omega.assign(L, 1.0 / static_cast<double>(L));
        h.empty_diagram = true;
    }
    return h;
}

inline PersistenceHistogram bin_diagram(const TiltedDiagram& diagram, const Partition& p) {
    return std::visit([&](const auto& q) { return bin_diagram(diagram, q); }, p);
}

// k-means centers fit separately on pooled pre-change and post-change tilted
// points; the returned partition uses the union, deduplicated within 1e-9.
inline VoronoiPartition fit_persistence_clusters(std::span<const TiltedDiagram> pre,
                                                 std::span<const TiltedDiagram> post,
                                                 int k_pre, int k_post, std::uint64_t seed,
                                                 std::span<const int> dims) {
    auto pre_pts = detail::pooled_tilted_points(pre, dims);
    auto post_pts = detail::pooled_tilted_points(post, dims);
    if (static_cast<int>(pre_pts.size()) < k_pre)
        throw std::invalid_argument("fit_persistence_clusters: too few pre-change points");
    if (static_cast<int>(post_pts.size()) < k_post)
        throw std::invalid_argument("fit_persistence_clusters: too few post-change points");

    auto pre_res = kmeans_2d(pre_pts, k_pre, derive_seed(seed, "clusters-pre"));
    auto post_res = kmeans_2d(post_pts, k_post, derive_seed(seed, "clusters-post"));

    VoronoiPartition out;
    out.dims.assign(dims.begin(), dims.end());
    auto add_center = [&out](const std::array<double, 2>& c) {
        for (const auto& existing : out.centers)
            if (std::abs(existing[0] - c[0]) <= 1e-9 && std::abs(existing[1] - c[1]) <= 1e-9)
                return;
        out.centers.push_back(c);
    };
    for (const auto& c : pre_res.centers) add_center(c);
    for (const auto& c : post_res.centers) add_center(c);
    if (out.centers.size() < 2)
        throw std::invalid_argument("fit_persistence_clusters: need at least 2 distinct centers");
    return out;
}

// Elbow rule: k maximising the second difference of k-means inertia over the
// candidate range (ties and too-short ranges resolve to the smallest k).
inline int elbow_select_k(std::span<const TiltedDiagram> diagrams, std::span<const int> k_range,
                          std::uint64_t seed, std::span<const int> dims) {
    if (k_range.empty()) throw std::invalid_argument("elbow_select_k: empty range");
    std::vector<int> ks(k_range.begin(), k_range.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    auto points = detail::pooled_tilted_points(diagrams, dims);
    if (ks.back() > static_cast<int>(points.size()))
        throw std::invalid_argument("elbow_select_k: max k exceeds pooled point count");
    if (ks.size() < 3) return ks.front();

    std::vector<double> inertia(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i)
        inertia[i] = kmeans_2d(points, ks[i], derive_seed(seed, "elbow", ks[i])).inertia;

    int best_k = ks[1];
    double best_curv = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < ks.size(); ++i) {
        const double curv = inertia[i - 1] - 2.0 * inertia[i] + inertia[i + 1];
        if (curv > best_curv) {
            best_curv = curv;
            best_k = ks[i];
        }
    }
    return best_k;
}

}  // namespace percept
