#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "percept/lower_star.hpp"
#include "percept/persistence.hpp"
#include "percept/rips.hpp"

using percept::PersistenceDiagram;
using percept::PointCloud;
using percept::compute_persistence;

namespace {

std::vector<percept::Feature> features_of_dim(const PersistenceDiagram& d, int dim,
                                              bool essential) {
    std::vector<percept::Feature> out;
    for (const auto& f : d.features)
        if (f.dim == dim && f.essential() == essential) out.push_back(f);
    return out;
}

}  // namespace

TEST(Persistence, SinglePoint) {
    PointCloud cloud(2);
    cloud.push_back({0.3, -0.7});
    auto pd = compute_persistence(percept::build_rips_filtration(cloud, 1.0, 2));
    ASSERT_EQ(pd.features.size(), 1u);
    EXPECT_EQ(pd.features[0].dim, 0);
    EXPECT_TRUE(pd.features[0].essential());
    EXPECT_DOUBLE_EQ(pd.features[0].birth, 0.0);
}

TEST(Persistence, EquilateralTriangle) {
    PointCloud cloud(2);
    cloud.push_back({0.0, 0.0});
    cloud.push_back({1.0, 0.0});
    cloud.push_back({0.5, std::sqrt(3.0) / 2.0});
    auto pd = compute_persistence(percept::build_rips_filtration(cloud, 2.0, 2));

    auto h0 = features_of_dim(pd, 0, false);
    ASSERT_EQ(h0.size(), 2u);
    for (const auto& f : h0) {
        EXPECT_DOUBLE_EQ(f.birth, 0.0);
        EXPECT_NEAR(f.death, 1.0, 1e-12);
    }
    EXPECT_EQ(features_of_dim(pd, 0, true).size(), 1u);
    EXPECT_TRUE(features_of_dim(pd, 1, false).empty());
    EXPECT_TRUE(features_of_dim(pd, 1, true).empty());
}

TEST(Persistence, UnitSquareLoop) {
    PointCloud cloud(2);
    cloud.push_back({0.0, 0.0});
    cloud.push_back({1.0, 0.0});
    cloud.push_back({1.0, 1.0});
    cloud.push_back({0.0, 1.0});
    auto pd = compute_persistence(percept::build_rips_filtration(cloud, 2.0, 2));

    auto h1 = features_of_dim(pd, 1, false);
    ASSERT_EQ(h1.size(), 1u);
    EXPECT_NEAR(h1[0].birth, 1.0, 1e-12);
    EXPECT_NEAR(h1[0].death, std::sqrt(2.0), 1e-12);
    EXPECT_EQ(features_of_dim(pd, 0, false).size(), 3u);
}

TEST(Persistence, MatchesBruteForceOnRandomRips) {
    std::mt19937_64 rng(101);
    std::uniform_int_distribution<int> nd(1, 10), dd(1, 3);
    for (int trial = 0; trial < 60; ++trial) {
        auto cloud = oracles::random_cloud(rng, nd(rng), dd(rng));
        auto f = percept::build_rips_filtration(cloud, 2.0, 2);
        EXPECT_TRUE(oracles::same_diagram(compute_persistence(f),
                                          oracles::brute_force_persistence(f)))
            << "trial " << trial;
    }
}

TEST(Persistence, MatchesBruteForceOnRandomImages) {
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<int> sz(1, 4);
    for (int trial = 0; trial < 25; ++trial) {
        auto img = oracles::random_image(rng, sz(rng), sz(rng));
        auto f = percept::build_lower_star_filtration(img);
        EXPECT_TRUE(oracles::same_diagram(compute_persistence(f),
                                          oracles::brute_force_persistence(f)))
            << "trial " << trial;
    }
}

// Finite + essential H0 classes account for every vertex; essential H0 count
// equals the component count at the top of the filtration.
TEST(Persistence, VertexAndComponentAccounting) {
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<int> nd(1, 10);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = nd(rng);
        auto cloud = oracles::random_cloud(rng, n, 2);
        // small radius so several components usually survive
        auto f = percept::build_rips_filtration(cloud, 0.4, 2);
        auto pd = compute_persistence(f);
        const auto finite = features_of_dim(pd, 0, false).size();
        const auto essential = features_of_dim(pd, 0, true).size();
        EXPECT_EQ(finite + essential, static_cast<std::size_t>(n));
        EXPECT_EQ(static_cast<int>(essential),
                  oracles::component_count(f, std::numeric_limits<double>::infinity()));
    }
}

TEST(Persistence, DeterministicGivenFiltration) {
    std::mt19937_64 rng(104);
    auto cloud = oracles::random_cloud(rng, 8, 2);
    auto f = percept::build_rips_filtration(cloud, 2.0, 2);
    auto a = compute_persistence(f);
    auto b = compute_persistence(f);
    EXPECT_TRUE(oracles::same_diagram(a, b, 0.0));
}

TEST(Tilt, FiniteFeatures) {
    PersistenceDiagram d;
    d.features.push_back({0.0, 1.0, 0});
    d.features.push_back({0.2, 0.9, 1});
    auto t = percept::tilt(d, percept::EssentialPolicy::drop());
    ASSERT_EQ(t.features.size(), 2u);
    EXPECT_DOUBLE_EQ(t.features[0].birth, 0.0);
    EXPECT_DOUBLE_EQ(t.features[0].persistence, 1.0);
    EXPECT_DOUBLE_EQ(t.features[1].birth, 0.2);
    EXPECT_NEAR(t.features[1].persistence, 0.7, 1e-15);
}

TEST(Tilt, EssentialPolicies) {
    PersistenceDiagram d;
    d.features.push_back({0.0, percept::kEssentialDeath, 0});

    auto dropped = percept::tilt(d, percept::EssentialPolicy::drop());
    EXPECT_TRUE(dropped.features.empty());

    auto capped = percept::tilt(d, percept::EssentialPolicy::cap_at(2.0));
    ASSERT_EQ(capped.features.size(), 1u);
    EXPECT_DOUBLE_EQ(capped.features[0].birth, 0.0);
    EXPECT_DOUBLE_EQ(capped.features[0].persistence, 2.0);

    d.features.push_back({3.0, percept::kEssentialDeath, 0});
    EXPECT_THROW(percept::tilt(d, percept::EssentialPolicy::cap_at(2.0)), std::invalid_argument);
}
