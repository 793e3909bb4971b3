#include "voi/core.hpp"
#include "voi/errors.hpp"
#include "voi/info.hpp"
#include "voi/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace voi;

namespace {

std::vector<double> unit_gaussian(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& v : out) v = rng.normal();
    return out;
}

double population_variance(const std::vector<double>& x) {
    double mean = 0.0;
    for (const double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (const double v : x) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(x.size());
}

}  // namespace

TEST(LloydMaxOracle, KnownValues) {
    EXPECT_NEAR(oracle::lloyd_max_mse(2), 1.0 - 2.0 / std::numbers::pi, 1e-12);
    EXPECT_NEAR(oracle::lloyd_max_mse(4), 0.11748, 1e-4);
    EXPECT_NEAR(oracle::lloyd_max_mse(8), 0.03454, 1e-4);
}

TEST(Hartley, SingleCellIsHalfVariance) {
    const auto x = unit_gaussian(5000, 3);
    const auto est = hartley_value_estimate(x, 1, 2, 9);
    EXPECT_NEAR(est.u_value, -0.5 * population_variance(x), 1e-12);
    EXPECT_EQ(est.info_nats, 0.0);
    EXPECT_EQ(est.k, 1u);
}

TEST(Hartley, TwoLevelGaussianMatchesLloydMax) {
    const auto x = unit_gaussian(100000, 11);
    const auto est = hartley_value_estimate(x, 2, 3, 5);
    EXPECT_NEAR(est.u_value, -0.5 * oracle::lloyd_max_mse(2), 0.005);
    EXPECT_NEAR(est.u_value, -0.1817, 0.005);
    EXPECT_NEAR(est.info_nats, std::log(2.0), 1e-15);
    ASSERT_EQ(est.centroids.size(), 2u);
    const double c = std::sqrt(2.0 / std::numbers::pi);
    EXPECT_NEAR(std::min(est.centroids[0][0], est.centroids[1][0]), -c, 0.02);
    EXPECT_NEAR(std::max(est.centroids[0][0], est.centroids[1][0]), c, 0.02);
}

TEST(Hartley, HigherKMatchesLloydMax) {
    const auto x = unit_gaussian(40000, 17);
    for (const std::size_t k : {4u, 8u}) {
        const auto est = hartley_value_estimate(x, k, 4, 1);
        const double target = -0.5 * oracle::lloyd_max_mse(k);
        EXPECT_NEAR(est.u_value, target, 0.03 * std::abs(target) + 3.0 * est.std_error) << "k = " << k;
    }
}

TEST(Hartley, NondecreasingInK) {
    const auto x = unit_gaussian(20000, 23);
    double prev = -INFINITY;
    for (std::size_t k = 1; k <= 8; ++k) {
        const double u = hartley_value_estimate(x, k, 4, 77).u_value;
        EXPECT_LE(u, 0.0);
        EXPECT_GE(u, prev - 1e-12) << "k = " << k;
        prev = u;
    }
}

TEST(Hartley, ShannonValueDominates) {
    const auto x = unit_gaussian(50000, 29);
    const EntropyNats h = gaussian_entropy_from_sample(x);
    for (const std::size_t k : {1u, 2u, 3u, 4u, 8u}) {
        const auto est = hartley_value_estimate(x, k, 3, 4);
        EXPECT_LE(est.u_value, u_of_info(std::log(static_cast<double>(k)), h) + 3.0 * est.std_error) << "k = " << k;
    }
}

TEST(Hartley, DeterministicForSeed) {
    const auto x = unit_gaussian(3000, 31);
    const auto a = hartley_value_estimate(x, 5, 4, 123);
    const auto b = hartley_value_estimate(x, 5, 4, 123);
    EXPECT_EQ(a.u_value, b.u_value);
    EXPECT_EQ(a.best_restart, b.best_restart);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.seed, 123u);
    EXPECT_EQ(a.restarts, 4);
}

TEST(Hartley, MoreRestartsNeverWorse) {
    // Restart r uses the same seed in both runs, so the larger budget contains the smaller one.
    const auto x = unit_gaussian(4000, 37);
    const double few = hartley_value_estimate(x, 6, 2, 8).u_value;
    const double many = hartley_value_estimate(x, 6, 8, 8).u_value;
    EXPECT_GE(many, few);
}

TEST(Hartley, SeparatedClustersInTwoDimensions) {
    Rng rng(41);
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 2000; ++i) {
        const double cx = (i % 2 == 0) ? -10.0 : 10.0;
        pts.push_back({cx + 0.1 * rng.normal(), 0.1 * rng.normal()});
    }
    const auto est = hartley_value_estimate(pts, 2, 3, 0);
    // within-cell mean squared distance is the sum of the two coordinate variances
    EXPECT_NEAR(est.u_value, -0.5 * 0.02, 0.002);
    ASSERT_EQ(est.centroids.size(), 2u);
    EXPECT_EQ(est.centroids[0].size(), 2u);
}

TEST(Hartley, KEqualsSampleCountIsExact) {
    const std::vector<double> x{1.0, 4.0, -2.0, 7.5};
    const auto est = hartley_value_estimate(x, 4, 1, 0);
    EXPECT_EQ(est.u_value, 0.0);
}

TEST(Hartley, Errors) {
    const std::vector<double> empty;
    const std::vector<double> three{1.0, 2.0, 3.0};
    EXPECT_THROW((void)hartley_value_estimate(empty, 1, 1, 0), DataError);
    EXPECT_THROW((void)hartley_value_estimate(three, 4, 1, 0), DomainError);
    EXPECT_THROW((void)hartley_value_estimate(three, 0, 1, 0), DomainError);
    EXPECT_THROW((void)hartley_value_estimate(three, 2, 0, 0), DomainError);
}
