#pragma once

// Reference values computed independently of the library code paths.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "voi/rng.hpp"

namespace oracle {

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Mean squared error of the optimal k-level quantizer of a standard normal,
/// from the Lloyd-Max fixed point on the exact density.
inline double lloyd_max_mse(std::size_t k) {
    if (k == 1) return 1.0;
    std::vector<double> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = -2.0 + 4.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(k);
    std::vector<double> t(k + 1);
    for (int iter = 0; iter < 20000; ++iter) {
        t[0] = -INFINITY;
        t[k] = INFINITY;
        for (std::size_t i = 1; i < k; ++i) t[i] = 0.5 * (c[i - 1] + c[i]);
        for (std::size_t i = 0; i < k; ++i) {
            const double mass = normal_cdf(t[i + 1]) - normal_cdf(t[i]);
            c[i] = (normal_pdf(t[i]) - normal_pdf(t[i + 1])) / mass;
        }
    }
    double explained = 0.0;
    for (std::size_t i = 0; i < k; ++i) explained += (normal_cdf(t[i + 1]) - normal_cdf(t[i])) * c[i] * c[i];
    return 1.0 - explained;
}

/// MI of a bivariate Gaussian with correlation rho, in nats.
inline double bivariate_gaussian_mi(double rho) { return -0.5 * std::log(1.0 - rho * rho); }

/// Central finite difference of f at x.
inline double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// N x cols matrix of standard normal draws.
inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    voi::Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

/// Pairs (z, x) with unit variances and correlation rho.
inline Eigen::MatrixXd correlated_pairs(Eigen::Index rows, double rho, std::uint64_t seed) {
    Eigen::MatrixXd g = gaussian_matrix(rows, 2, seed);
    Eigen::MatrixXd out(rows, 2);
    out.col(0) = g.col(0);
    out.col(1) = rho * g.col(0) + std::sqrt(1.0 - rho * rho) * g.col(1);
    return out;
}

/// AR(1) path with stationary start.
inline std::vector<double> ar1(std::size_t n, double phi, double noise, std::uint64_t seed) {
    voi::Rng rng(seed);
    std::vector<double> out(n);
    double prev = noise / std::sqrt(1.0 - phi * phi) * rng.normal();
    for (auto& v : out) {
        prev = phi * prev + noise * rng.normal();
        v = prev;
    }
    return out;
}

/// Plain least squares with intercept through the normal equations.
inline Eigen::VectorXd least_squares_fitted(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    const Eigen::VectorXd beta = (design.transpose() * design).ldlt().solve(design.transpose() * y);
    return design * beta;
}

}  // namespace oracle
