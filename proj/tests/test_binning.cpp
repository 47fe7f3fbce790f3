#include <gtest/gtest.h>

#include <random>

#include "percept/binning.hpp"
#include "percept/diagram_distance.hpp"

using percept::HistogramBins;
using percept::TiltedDiagram;
using percept::VoronoiPartition;
using percept::bin_diagram;

namespace {

constexpr int kDims0[] = {0};

TiltedDiagram make_tilted(std::initializer_list<std::pair<double, double>> pts, int dim = 0) {
    TiltedDiagram d;
    for (auto [b, p] : pts) d.features.push_back({b, p, dim});
    return d;
}

}  // namespace

TEST(EqualWidthBins, FourBinsOverUnitRange) {
    std::vector<TiltedDiagram> ref{make_tilted({{0.2, 1.0}, {1.0, 0.5}, {0.7, 0.3}})};
    auto bins = percept::make_equal_width_bins(ref, 4, kDims0);
    ASSERT_EQ(bins.breakpoints.size(), 1u);
    const auto& b = bins.breakpoints[0];
    ASSERT_EQ(b.size(), 4u);
    EXPECT_NEAR(b[0], 0.25, 1e-12);
    EXPECT_NEAR(b[1], 0.50, 1e-12);
    EXPECT_NEAR(b[2], 0.75, 1e-12);
    EXPECT_NEAR(b[3], 1.0 + 1e-9, 1e-12);
}

TEST(EqualWidthBins, EmptyReferenceFails) {
    std::vector<TiltedDiagram> ref{TiltedDiagram{}, TiltedDiagram{}};
    EXPECT_THROW(percept::make_equal_width_bins(ref, 4, kDims0), std::invalid_argument);
}

TEST(EqualMassBins, EqualPersistencesSplitEvenly) {
    auto ref = make_tilted({{0.1, 1.0}, {0.2, 1.0}, {0.3, 1.0}, {0.4, 1.0}});
    auto bins = percept::make_equal_mass_bins(ref, 2, kDims0);
    const auto& b = bins.breakpoints[0];
    ASSERT_EQ(b.size(), 2u);
    EXPECT_NEAR(b[0], 0.25, 1e-12);  // midpoint between 2nd and 3rd births
    auto h = bin_diagram(ref, bins);
    EXPECT_DOUBLE_EQ(h.f[0], 2.0);
    EXPECT_DOUBLE_EQ(h.f[1], 2.0);
}

TEST(EqualMassBins, GreedyCrossesAtHeavyFirstFeature) {
    auto ref = make_tilted({{0.1, 4.0}, {0.2, 1.0}, {0.3, 1.0}, {0.4, 1.0}, {0.5, 1.0}});
    auto bins = percept::make_equal_mass_bins(ref, 2, kDims0);
    auto h = bin_diagram(ref, bins);
    EXPECT_DOUBLE_EQ(h.f[0], 4.0);
    EXPECT_DOUBLE_EQ(h.f[1], 4.0);

    // exhaustive check: of all single-cut placements, splitting right after
    // the heavy feature minimizes the deviation from equal mass
    const double total = 8.0;
    std::vector<double> masses{4.0, 1.0, 1.0, 1.0, 1.0};
    double best_dev = 1e18;
    std::size_t best_cut = 0;
    for (std::size_t cut = 1; cut < masses.size(); ++cut) {
        double left = 0.0;
        for (std::size_t i = 0; i < cut; ++i) left += masses[i];
        const double dev = std::abs(left - total / 2);
        if (dev < best_dev) {
            best_dev = dev;
            best_cut = cut;
        }
    }
    EXPECT_EQ(best_cut, 1u);
}

TEST(EqualMassBins, RejectsSingleBin) {
    auto ref = make_tilted({{0.1, 1.0}, {0.2, 1.0}});
    EXPECT_THROW(percept::make_equal_mass_bins(ref, 1, kDims0), std::invalid_argument);
}

TEST(BinDiagram, HistogramProportions) {
    auto d = make_tilted({{0.1, 0.5}, {0.3, 0.2}});
    HistogramBins bins;
    bins.dims = {0};
    bins.breakpoints = {{0.2, 0.4}};
    auto h = bin_diagram(d, bins);
    ASSERT_EQ(h.f.size(), 2u);
    EXPECT_DOUBLE_EQ(h.f[0], 0.5);
    EXPECT_DOUBLE_EQ(h.f[1], 0.2);
    EXPECT_NEAR(h.omega[0], 5.0 / 7.0, 1e-12);
    EXPECT_NEAR(h.omega[1], 2.0 / 7.0, 1e-12);
    EXPECT_FALSE(h.empty_diagram);
}

TEST(BinDiagram, AllMassInFirstBin) {
    auto d = make_tilted({{0.05, 1.0}, {0.1, 2.0}});
    HistogramBins bins;
    bins.dims = {0};
    bins.breakpoints = {{0.2, 0.4, 0.6}};
    auto h = bin_diagram(d, bins);
    EXPECT_DOUBLE_EQ(h.omega[0], 1.0);
    EXPECT_DOUBLE_EQ(h.omega[1], 0.0);
    EXPECT_DOUBLE_EQ(h.omega[2], 0.0);
}

TEST(BinDiagram, BirthBeyondLastBreakClampsIntoLastBin) {
    auto d = make_tilted({{5.0, 1.5}});
    HistogramBins bins;
    bins.dims = {0};
    bins.breakpoints = {{0.5, 1.0}};
    auto h = bin_diagram(d, bins);
    EXPECT_DOUBLE_EQ(h.f[1], 1.5);
}

TEST(BinDiagram, VoronoiNearestCenter) {
    auto d = make_tilted({{0.4, 0.7}});
    VoronoiPartition part;
    part.dims = {0};
    part.centers = {{0.0, 1.0}, {1.0, 1.0}};
    auto h = bin_diagram(d, part);
    EXPECT_DOUBLE_EQ(h.f[0], 0.7);
    EXPECT_DOUBLE_EQ(h.f[1], 0.0);
}

TEST(BinDiagram, EmptyDiagramUniformOmega) {
    TiltedDiagram empty;
    HistogramBins bins;
    bins.dims = {0};
    bins.breakpoints = {{0.5, 1.0}};
    auto h = bin_diagram(empty, bins);
    EXPECT_TRUE(h.empty_diagram);
    EXPECT_DOUBLE_EQ(h.f[0], 0.0);
    EXPECT_DOUBLE_EQ(h.omega[0], 0.5);
    EXPECT_DOUBLE_EQ(h.omega[1], 0.5);
}

TEST(BinDiagram, MassConservationBothPartitionKinds) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        TiltedDiagram d;
        for (int i = 0; i < 12; ++i) d.features.push_back({u(rng), u(rng) + 0.01, 0});
        const double total = percept::total_persistence(d);

        HistogramBins bins;
        bins.dims = {0};
        bins.breakpoints = {{0.25, 0.5, 0.75, 1.0 + 1e-9}};
        auto h = bin_diagram(d, bins);
        double sum = 0.0;
        for (double v : h.f) sum += v;
        EXPECT_NEAR(sum, total, 1e-12);

        VoronoiPartition part;
        part.dims = {0};
        part.centers = {{0.2, 0.3}, {0.8, 0.7}, {0.5, 0.1}};
        auto hv = bin_diagram(d, part);
        sum = 0.0;
        for (double v : hv.f) sum += v;
        EXPECT_NEAR(sum, total, 1e-12);
    }
}

// Scaling every persistence by c scales f by c and leaves omega unchanged.
TEST(BinDiagram, ScaleCovariance) {
    auto d = make_tilted({{0.1, 0.5}, {0.3, 0.2}, {0.7, 1.1}});
    TiltedDiagram scaled = d;
    const double c = 3.7;
    for (auto& f : scaled.features) f.persistence *= c;

    HistogramBins bins;
    bins.dims = {0};
    bins.breakpoints = {{0.2, 0.4, 0.8}};
    auto h1 = bin_diagram(d, bins);
    auto h2 = bin_diagram(scaled, bins);
    for (std::size_t l = 0; l < h1.f.size(); ++l) {
        EXPECT_NEAR(h2.f[l], c * h1.f[l], 1e-12);
        EXPECT_NEAR(h2.omega[l], h1.omega[l], 1e-12);
    }
}

TEST(Clusters, OneMeansIsCentroid) {
    std::vector<TiltedDiagram> pre{make_tilted({{0.0, 1.0}, {1.0, 2.0}})};
    std::vector<TiltedDiagram> post{make_tilted({{4.0, 1.0}, {6.0, 3.0}})};
    auto part = percept::fit_persistence_clusters(pre, post, 1, 1, 7, kDims0);
    ASSERT_EQ(part.centers.size(), 2u);
    EXPECT_NEAR(part.centers[0][0], 0.5, 1e-9);
    EXPECT_NEAR(part.centers[0][1], 1.5, 1e-9);
    EXPECT_NEAR(part.centers[1][0], 5.0, 1e-9);
    EXPECT_NEAR(part.centers[1][1], 2.0, 1e-9);
}

// Exhaustive 2-partition search on 12 points certifies the k-means optimum.
TEST(Clusters, TwoBlobsMatchExhaustiveSearch) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    std::vector<std::array<double, 2>> pts;
    TiltedDiagram diagram;
    for (int i = 0; i < 6; ++i) {
        pts.push_back({0.0 + u(rng), 1.0 + u(rng)});
        pts.push_back({3.0 + u(rng), 4.0 + u(rng)});
    }
    for (auto& p : pts) diagram.features.push_back({p[0], p[1], 0});

    double best_sse = 1e18;
    std::array<double, 2> best_a{}, best_b{};
    const int n = static_cast<int>(pts.size());
    for (int mask = 1; mask + 1 < (1 << n); ++mask) {
        std::array<double, 2> ca{0, 0}, cb{0, 0};
        int na = 0, nb = 0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1 << i)) {
                ca[0] += pts[i][0];
                ca[1] += pts[i][1];
                ++na;
            } else {
                cb[0] += pts[i][0];
                cb[1] += pts[i][1];
                ++nb;
            }
        }
        if (na == 0 || nb == 0) continue;
        ca = {ca[0] / na, ca[1] / na};
        cb = {cb[0] / nb, cb[1] / nb};
        double sse = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& c = (mask & (1 << i)) ? ca : cb;
            sse += (pts[i][0] - c[0]) * (pts[i][0] - c[0]) +
                   (pts[i][1] - c[1]) * (pts[i][1] - c[1]);
        }
        if (sse < best_sse) {
            best_sse = sse;
            best_a = ca;
            best_b = cb;
        }
    }

    auto res = percept::kmeans_2d(pts, 2, 99);
    EXPECT_NEAR(res.inertia, best_sse, 1e-9);
    std::vector<std::array<double, 2>> got = res.centers;
    std::sort(got.begin(), got.end());
    std::vector<std::array<double, 2>> want{best_a, best_b};
    std::sort(want.begin(), want.end());
    for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(got[c][0], want[c][0], 1e-6);
        EXPECT_NEAR(got[c][1], want[c][1], 1e-6);
    }

    std::vector<TiltedDiagram> pre{diagram};
    auto part = percept::fit_persistence_clusters(pre, pre, 2, 2, 99, kDims0);
    EXPECT_EQ(part.centers.size(), 2u);  // pre and post coincide -> deduplicated
}

TEST(Clusters, InsufficientPointsFail) {
    std::vector<TiltedDiagram> pre{make_tilted({{0.0, 1.0}})};
    EXPECT_THROW(percept::fit_persistence_clusters(pre, pre, 2, 1, 7, kDims0),
                 std::invalid_argument);
}

TEST(Elbow, ThreeBlobs) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-0.08, 0.08);
    std::vector<TiltedDiagram> diagrams(1);
    const double centers[3][2] = {{0.0, 0.0}, {5.0, 0.0}, {2.5, 5.0}};
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 15; ++i)
            diagrams[0].features.push_back({centers[c][0] + u(rng), centers[c][1] + u(rng), 0});
    const int range[] = {1, 2, 3, 4, 5, 6};
    EXPECT_EQ(percept::elbow_select_k(diagrams, range, 21, kDims0), 3);
}

TEST(Elbow, SingletonRange) {
    std::vector<TiltedDiagram> diagrams{make_tilted({{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}})};
    const int range[] = {2};
    EXPECT_EQ(percept::elbow_select_k(diagrams, range, 3, kDims0), 2);
}

// The selection must agree with recomputing inertia curvature directly and
// applying the smallest-k tie rule.
TEST(Elbow, MatchesCurvatureOracle) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TiltedDiagram> diagrams(1);
    for (int i = 0; i < 40; ++i) diagrams[0].features.push_back({u(rng), u(rng), 0});
    std::vector<int> range{1, 2, 3, 4, 5, 6, 7};

    std::vector<std::array<double, 2>> pts;
    for (const auto& f : diagrams[0].features) pts.push_back({f.birth, f.persistence});
    std::vector<double> inertia(range.size());
    for (std::size_t i = 0; i < range.size(); ++i)
        inertia[i] =
            percept::kmeans_2d(pts, range[i], percept::derive_seed(17, "elbow", range[i]))
                .inertia;
    int want = range[1];
    double best = -1e18;
    for (std::size_t i = 1; i + 1 < range.size(); ++i) {
        const double curv = inertia[i - 1] - 2 * inertia[i] + inertia[i + 1];
        if (curv > best) {
            best = curv;
            want = range[i];
        }
    }
    EXPECT_EQ(percept::elbow_select_k(diagrams, range, 17, kDims0), want);
}

// Shared births, perturbed persistences, one point per bin: the squared
// frequency gap dominates the squared bottleneck distance.
TEST(FrequencyGapBound, DominatesBottleneckUnderFineBins) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int holds = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 6;
        std::vector<double> births(n);
        for (auto& b : births) b = u(rng);
        std::sort(births.begin(), births.end());

        percept::PersistenceDiagram pre_untilted, post_untilted;
        TiltedDiagram pre, post;
        for (int i = 0; i < n; ++i) {
            const double v = 0.2 + u(rng);
            const double dv = 0.3 * (u(rng) - 0.5);
            pre.features.push_back({births[i], v, 0});
            post.features.push_back({births[i], v + dv, 0});
            pre_untilted.features.push_back({births[i], births[i] + v, 0});
            post_untilted.features.push_back({births[i], births[i] + v + dv, 0});
        }

        // bins fine enough for one birth per bin
        std::vector<double> breaks;
        for (int i = 0; i + 1 < n; ++i) breaks.push_back(0.5 * (births[i] + births[i + 1]));
        breaks.push_back(births.back() + 1e-9);
        HistogramBins bins;
        bins.dims = {0};
        bins.breakpoints = {breaks};

        auto f_pre = bin_diagram(pre, bins).f;
        auto f_post = bin_diagram(post, bins).f;
        double gap2 = 0.0;
        for (std::size_t l = 0; l < f_pre.size(); ++l)
            gap2 += (f_pre[l] - f_post[l]) * (f_pre[l] - f_post[l]);
        const double db = percept::bottleneck_distance(pre_untilted, post_untilted, 0);
        if (gap2 >= db * db - 1e-12) ++holds;
    }
    EXPECT_EQ(holds, trials);
}
