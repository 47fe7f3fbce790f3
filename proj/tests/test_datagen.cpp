#include <gtest/gtest.h>

#include <cmath>

#include "percept/scenario.hpp"

using percept::Scenario;
using percept::ScenarioKind;

TEST(SampleShape, NoiselessCircleOnUnitRadius) {
    auto rng = percept::make_rng(1, "test");
    std::vector<double> axes{1.0, 1.0};
    auto cloud = percept::sample_shape(axes, 200, 0.0, rng);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double norm = std::hypot(cloud[i][0], cloud[i][1]);
        EXPECT_NEAR(norm, 1.0, 1e-12);
    }
}

TEST(SampleShape, NoiselessEllipseOnSurface) {
    auto rng = percept::make_rng(2, "test");
    std::vector<double> axes{2.0, 1.0};
    auto cloud = percept::sample_shape(axes, 200, 0.0, rng);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double x = cloud[i][0] / 2.0, y = cloud[i][1];
        EXPECT_NEAR(x * x + y * y, 1.0, 1e-12);
    }
}

TEST(SampleShape, RadialResidualTracksSigma) {
    auto rng = percept::make_rng(3, "test");
    std::vector<double> axes{1.0, 1.0};
    const double sigma = 0.07;
    double ss = 0.0;
    int n = 0;
    for (int f = 0; f < 200; ++f) {
        auto cloud = percept::sample_shape(axes, 100, sigma, rng);
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double r = std::hypot(cloud[i][0], cloud[i][1]) - 1.0;
            ss += r * r;
            ++n;
        }
    }
    const double sd = std::sqrt(ss / n);
    EXPECT_NEAR(sd, sigma, 0.1 * sigma);
}

TEST(Scenario, DefaultsMatchExperimentSetup) {
    Scenario sc;
    EXPECT_EQ(sc.frames, 400);
    EXPECT_EQ(sc.change_at, 200);
    EXPECT_EQ(sc.points_per_frame, 100);
    EXPECT_DOUBLE_EQ(sc.sigma_pre, 0.05);
    EXPECT_DOUBLE_EQ(sc.sigma_post, 0.10);
}

TEST(Scenario, NoiseChangeKeepsGeometry) {
    Scenario sc;
    sc.kind = ScenarioKind::noise_change;
    sc.pre_axes = {1.0, 1.0};
    sc.post_axes = {2.0, 1.0};
    EXPECT_THROW(sc.validate(), std::invalid_argument);
    sc.post_axes = sc.pre_axes;
    EXPECT_NO_THROW(sc.validate());
}

TEST(Scenario, DeterministicAcrossRuns) {
    Scenario sc;
    sc.kind = ScenarioKind::shape_change;
    sc.pre_axes = {1.0, 1.0};
    sc.post_axes = {2.0, 1.0};
    sc.frames = 20;
    sc.change_at = 10;
    sc.points_per_frame = 30;
    sc.seed = 77;
    auto a = percept::generate_scenario(sc);
    auto b = percept::generate_scenario(sc);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_EQ(a[t].data(), b[t].data());
}

TEST(Scenario, ChangeHappensAfterChangeFrame) {
    Scenario sc;
    sc.kind = ScenarioKind::shape_change;
    sc.pre_axes = {1.0, 1.0};
    sc.post_axes = {2.0, 1.0};
    sc.sigma_pre = 0.0;
    sc.sigma_post = 0.0;
    sc.frames = 12;
    sc.change_at = 6;
    sc.points_per_frame = 40;
    sc.seed = 5;
    auto frames = percept::generate_scenario(sc);
    for (int t = 0; t < 12; ++t) {
        double max_x = 0.0;
        for (std::size_t i = 0; i < frames[t].size(); ++i)
            max_x = std::max(max_x, std::abs(frames[t][i][0]));
        if (t < 6)
            EXPECT_LE(max_x, 1.0 + 1e-9) << "t=" << t;
    }
    // post-change frames stretch to the wider axis eventually
    double post_max = 0.0;
    for (int t = 6; t < 12; ++t)
        for (std::size_t i = 0; i < frames[t].size(); ++i)
            post_max = std::max(post_max, std::abs(frames[t][i][0]));
    EXPECT_GT(post_max, 1.5);
}

// Mean absolute radial residual before vs after the change: a two-sample
// z-test at alpha = 0.01 must notice sigma 0.05 -> 0.10.
TEST(Scenario, NoiseLevelsDifferAcrossChange) {
    Scenario sc;
    sc.kind = ScenarioKind::noise_change;
    sc.pre_axes = {1.0, 1.0};
    sc.post_axes = {1.0, 1.0};
    sc.frames = 100;
    sc.change_at = 50;
    sc.points_per_frame = 200;
    sc.seed = 9;
    auto frames = percept::generate_scenario(sc);

    auto radial_stats = [&](int lo, int hi) {
        double sum = 0.0, sum2 = 0.0;
        int n = 0;
        for (int t = lo; t < hi; ++t) {
            for (std::size_t i = 0; i < frames[t].size(); ++i) {
                const double r = std::abs(std::hypot(frames[t][i][0], frames[t][i][1]) - 1.0);
                sum += r;
                sum2 += r * r;
                ++n;
            }
        }
        const double mean = sum / n;
        const double var = sum2 / n - mean * mean;
        return std::tuple<double, double, int>(mean, var, n);
    };
    auto [m_pre, v_pre, n_pre] = radial_stats(0, 50);
    auto [m_post, v_post, n_post] = radial_stats(50, 100);
    const double z =
        (m_post - m_pre) / std::sqrt(v_pre / n_pre + v_post / n_post);
    EXPECT_GT(z, 2.576);  // alpha = 0.01, one-sided
}

TEST(GeometryAxes, NamesResolve) {
    auto circle = percept::geometry_axes("circle", 2);
    EXPECT_EQ(circle, (std::vector<double>{1.0, 1.0}));
    auto ellipsoid = percept::geometry_axes("ellipsoid", 4);
    EXPECT_EQ(ellipsoid, (std::vector<double>{2.0, 1.0, 1.0, 1.0}));
    EXPECT_THROW(percept::geometry_axes("torus", 2), std::invalid_argument);
}
