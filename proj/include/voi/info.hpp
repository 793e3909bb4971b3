#pragma once

#include "voi/core.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace voi {

struct CovMatrix {
    Eigen::MatrixXd entries;
    std::size_t n_samples = 0;

    [[nodiscard]] Eigen::Index dim() const { return entries.rows(); }
};

/// Gaussian mutual information estimate.
struct MIEstimate {
    double nats = 0.0;
    double bits = 0.0;
    double raw_nats = 0.0;  // before clamping at zero
    double shrinkage = 0.0;
    std::size_t predictor_dim = 0;
    std::size_t response_dim = 1;
    std::size_t n_samples = 0;
    bool low_sample_warning = false;  // N < p + 2
};

struct AcfSeries {
    std::vector<double> values;  // values[k] = autocorrelation at lag k

    [[nodiscard]] std::size_t max_lag() const { return values.empty() ? 0 : values.size() - 1; }
};

inline constexpr double kDefaultShrinkage = 0.01;

/// Column-centered covariance with 1/(N-1) normalization.
[[nodiscard]] CovMatrix sample_covariance(const Eigen::MatrixXd& data);

/// Shrinks K toward mean(diag K) * I: (1 - lambda) K + lambda * mean(diag K) * I.
[[nodiscard]] Eigen::MatrixXd shrink_covariance(const Eigen::MatrixXd& k, double shrinkage);

/// ln det of the shrunk matrix from the sum of log Cholesky pivots. Throws
/// NotPositiveDefinite (with the pivot index) when a pivot is not positive.
[[nodiscard]] double logdet_psd(const CovMatrix& k, double shrinkage = 0.0);
[[nodiscard]] double logdet_psd(const Eigen::MatrixXd& k, double shrinkage = 0.0);

/// I(X, Z) ~= (ln det K_z + ln det K_x - ln det K_{z+x}) / 2, with all three
/// blocks taken from one shrunk joint covariance of [z | x].
[[nodiscard]] MIEstimate gaussian_mi(const Eigen::MatrixXd& z, const Eigen::MatrixXd& x,
                                     double shrinkage = kDefaultShrinkage);

[[nodiscard]] EntropyNats gaussian_entropy_from_sample(std::span<const double> x);

/// Biased (1/N) sample autocorrelation about the full-sample mean.
[[nodiscard]] AcfSeries acf(std::span<const double> series, std::size_t max_lag);

}  // namespace voi
