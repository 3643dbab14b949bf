#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>

#include "besovtight/parallel.hpp"
#include "besovtight/rng.hpp"
#include "besovtight/stats.hpp"

using namespace besovtight;

TEST(Rng, SplitMixReferenceValue) {
    std::uint64_t s = 0;
    EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
}

TEST(Rng, ReproducibleAndDistinctStreams) {
    Xoshiro256 a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
    EXPECT_NE(Xoshiro256(42)(), c());
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(7, i));
    EXPECT_EQ(seeds.size(), 1000u);
    EXPECT_NE(derive_seed(7, 0), derive_seed(8, 0));
}

TEST(Rng, UniformMoments) {
    Xoshiro256 r(1);
    const int n = 200000;
    double s = 0, s2 = 0;
    std::uint64_t hist[5] = {};
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
        ++hist[r.below(5)];
    }
    EXPECT_NEAR(s / n, 0.5, 0.005);
    EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.005);
    for (auto h : hist) EXPECT_NEAR(static_cast<double>(h) / n, 0.2, 0.005);
}

TEST(Stats, IndependentMean) {
    const std::vector<double> xs{1, 2, 3, 4, 5};
    const auto e = independent_mean(xs);
    EXPECT_DOUBLE_EQ(e.mean, 3.0);
    EXPECT_NEAR(e.stderr_, std::sqrt(2.5 / 5), 1e-15);
    EXPECT_THROW(independent_mean(std::vector<double>{}), std::invalid_argument);
}

TEST(Stats, BinnedMeanOfBlocks) {
    // Four blocks of constant values 0, 1, 2, 3: block-means stderr = sd(0..3)/2.
    std::vector<double> xs;
    for (int b = 0; b < 4; ++b)
        for (int t = 0; t < 10; ++t) xs.push_back(b);
    const auto e = binned_mean(xs, 4);
    EXPECT_DOUBLE_EQ(e.mean, 1.5);
    EXPECT_NEAR(e.stderr_, std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3 / 4), 1e-15);
    EXPECT_EQ(e.n, 40u);
    EXPECT_THROW(binned_mean(xs, 1), std::invalid_argument);
}

TEST(Stats, BinnedMeanDetectsCorrelation) {
    // AR(1) with rho = 0.9: naive stderr underestimates by ~sqrt((1+rho)/(1-rho)).
    Xoshiro256 r(3);
    std::vector<double> xs;
    double x = 0;
    for (int i = 0; i < 100000; ++i) {
        const double g = std::sqrt(-2 * std::log(1 - r.uniform())) * std::cos(2 * M_PI * r.uniform());
        x = 0.9 * x + g;
        xs.push_back(x);
    }
    const double ratio = binned_mean(xs).stderr_ / independent_mean(xs).stderr_;
    EXPECT_GT(ratio, 3.0);
    EXPECT_LT(ratio, 6.0);
}

TEST(Fit, ExactLine) {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7}, w{1, 1, 1, 1};
    const auto f = weighted_linear_fit(x, y, w);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.chi2, 0.0, 1e-20);
    EXPECT_THROW(weighted_linear_fit(std::vector<double>{1, 1}, std::vector<double>{0, 1}, std::vector<double>{1, 1}),
                 std::invalid_argument);
}

TEST(Fit, OlsAgainstClosedForm) {
    const std::vector<double> x{0, 1, 2}, y{0, 2, 1};
    const auto f = unweighted_linear_fit(x, y);
    // slope = Sxy / Sxx about the mean = 1 / 2, intercept = 1 - 1/2 = 1/2
    EXPECT_NEAR(f.slope, 0.5, 1e-15);
    EXPECT_NEAR(f.intercept, 0.5, 1e-15);
    // residuals (-1/2, 1, -1/2): s^2 = 1.5, se(slope) = sqrt(s^2 / 2)
    EXPECT_NEAR(f.slope_stderr, std::sqrt(0.75), 1e-14);
}

TEST(Fit, Log2PowerLaw) {
    std::vector<ScalingPoint> pts;
    for (int n = 0; n < 5; ++n) pts.push_back({double(n), 3.0 * std::exp2(0.125 * n), 0.01});
    pts.push_back({5.0, -1.0, 0.1});
    const auto pf = fit_log2_values(pts);
    EXPECT_NEAR(pf.fit.slope, 0.125, 1e-12);
    EXPECT_NEAR(pf.fit.intercept, std::log2(3.0), 1e-12);
    EXPECT_EQ(pf.warnings.size(), 1u);
    EXPECT_THROW(fit_log2_values(std::span(pts).subspan(0, 2)), std::invalid_argument);
}

TEST(Parallel, EachIndexOnceAndErrorsPropagate) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                     if (i == 5) throw std::runtime_error("x");
                 }),
                 std::runtime_error);
}
