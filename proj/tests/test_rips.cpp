#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "percept/rips.hpp"

using percept::PointCloud;
using percept::build_rips_filtration;

namespace {

int count_dim(const percept::Filtration& f, int dim) {
    int c = 0;
    for (const auto& e : f.entries)
        if (e.simplex.dim() == dim) ++c;
    return c;
}

}  // namespace

TEST(Rips, TwoPointsSingleEdge) {
    PointCloud cloud(2);
    cloud.push_back({0.0, 0.0});
    cloud.push_back({0.5, 0.0});
    auto f = build_rips_filtration(cloud, 1.0, 2);
    EXPECT_EQ(count_dim(f, 0), 2);
    EXPECT_EQ(count_dim(f, 1), 1);
    EXPECT_EQ(count_dim(f, 2), 0);
    for (const auto& e : f.entries) {
        if (e.simplex.dim() == 0) EXPECT_DOUBLE_EQ(e.value, 0.0);
        if (e.simplex.dim() == 1) EXPECT_DOUBLE_EQ(e.value, 0.5);
    }
}

TEST(Rips, EquilateralTriangle) {
    PointCloud cloud(2);
    cloud.push_back({0.0, 0.0});
    cloud.push_back({1.0, 0.0});
    cloud.push_back({0.5, std::sqrt(3.0) / 2.0});
    auto f = build_rips_filtration(cloud, 2.0, 2);
    EXPECT_EQ(count_dim(f, 0), 3);
    EXPECT_EQ(count_dim(f, 1), 3);
    EXPECT_EQ(count_dim(f, 2), 1);
    for (const auto& e : f.entries)
        if (e.simplex.dim() > 0) EXPECT_NEAR(e.value, 1.0, 1e-12);
    percept::validate_filtration(f);
}

TEST(Rips, CircleEdgeCountMatchesBruteForce) {
    std::mt19937_64 rng(7);
    PointCloud cloud(2);
    for (int i = 0; i < 100; ++i) {
        const double a = 2.0 * M_PI * i / 100.0;
        cloud.push_back({std::cos(a), std::sin(a)});
    }
    const double max_radius = 2.5;
    auto f = build_rips_filtration(cloud, max_radius, 1);
    for (double eps : {0.1, 0.2, 0.5, 1.0, 1.5, 2.0, 2.5}) {
        int brute = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i)
            for (std::size_t j = i + 1; j < cloud.size(); ++j)
                if (percept::euclidean_distance(cloud[i], cloud[j]) <= eps) ++brute;
        int built = 0;
        for (const auto& e : f.entries)
            if (e.simplex.dim() == 1 && e.value <= eps) ++built;
        EXPECT_EQ(built, brute) << "eps=" << eps;
    }
}

TEST(Rips, MaxDimOneSkipsTriangles) {
    std::mt19937_64 rng(3);
    auto cloud = oracles::random_cloud(rng, 12, 3);
    auto f = build_rips_filtration(cloud, 10.0, 1);
    EXPECT_EQ(count_dim(f, 2), 0);
    EXPECT_EQ(count_dim(f, 1), 12 * 11 / 2);
}

TEST(Rips, Errors) {
    PointCloud empty(2);
    EXPECT_THROW(build_rips_filtration(empty, 1.0, 2), std::invalid_argument);

    PointCloud bad(2);
    bad.push_back({0.0, std::numeric_limits<double>::quiet_NaN()});
    EXPECT_THROW(build_rips_filtration(bad, 1.0, 2), std::invalid_argument);

    PointCloud ok(2);
    ok.push_back({0.0, 0.0});
    EXPECT_THROW(build_rips_filtration(ok, 0.0, 2), std::invalid_argument);
    EXPECT_THROW(build_rips_filtration(ok, 1.0, 3), std::invalid_argument);
}

TEST(Rips, RandomCloudsSatisfyFiltrationInvariant) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> nd(1, 9), dd(1, 3);
    for (int trial = 0; trial < 25; ++trial) {
        auto cloud = oracles::random_cloud(rng, nd(rng), dd(rng));
        auto f = build_rips_filtration(cloud, 1.5, 2);
        EXPECT_NO_THROW(percept::validate_filtration(f));
    }
}
