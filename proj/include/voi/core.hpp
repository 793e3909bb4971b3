#pragma once

// Value-of-information frontier for the quadratic utility u(x, y) = -(x - y)^2 / 2.
//
// Everything here is in nats. For a response with differential entropy H the
// best achievable expected utility given I nats of Shannon information is
//
//     U(I) = -(1 / 4pi) exp(2(H - I) - 1)
//
// parametrised by the inverse temperature beta through U(beta) = -1 / (2 beta)
// and I(beta) = H - (ln 2pi + 1 - ln beta) / 2. The RMSE frontier is
// sqrt(-2 U(I)), which reduces to sigma * exp(-I) for a Gaussian response.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace voi {

/// Differential entropy in nats. May be negative.
struct EntropyNats {
    double value = 0.0;
};

/// Strictly positive Lagrange multiplier of the utility constraint.
class InverseTemperature {
public:
    /// Throws DomainError unless beta > 0 and finite.
    explicit InverseTemperature(double beta);

    [[nodiscard]] double value() const noexcept { return beta_; }

private:
    double beta_;
};

struct FrontierPoint {
    double info_nats = 0.0;
    double u_value = 0.0;  // -MSE / 2
    double v_value = 0.0;  // u_value - U(0)
    double rmse = 0.0;     // sqrt(-2 u_value)
};

struct SigmaSource {
    double sigma = 1.0;
};

using FrontierSource = std::variant<SigmaSource, EntropyNats>;

struct FrontierCurve {
    FrontierSource source;
    std::vector<FrontierPoint> points;
};

[[nodiscard]] constexpr double nats_to_bits(double nats) noexcept {
    return nats / 0.693147180559945309417232121458176568;
}

[[nodiscard]] constexpr double bits_to_nats(double bits) noexcept {
    return bits * 0.693147180559945309417232121458176568;
}

/// Gamma_0(beta) = ln sqrt(2pi / beta).
[[nodiscard]] double gamma0_quadratic(InverseTemperature beta);

/// Expected utility at inverse temperature beta: -1 / (2 beta).
[[nodiscard]] double u_of_beta(InverseTemperature beta);

/// Shannon information at inverse temperature beta. Negative values lie
/// outside the feasible branch; see is_feasible_info().
[[nodiscard]] double i_of_beta(InverseTemperature beta, EntropyNats h);

[[nodiscard]] constexpr bool is_feasible_info(double info_nats) noexcept { return info_nats >= 0.0; }

/// Inverse of i_of_beta: beta = 2pi exp(2(I - H) + 1).
[[nodiscard]] InverseTemperature beta_of_info(double info_nats, EntropyNats h);

[[nodiscard]] double u_of_info(double info_nats, EntropyNats h);

/// V(I) = U(I) - U(0). Exactly zero at I = 0.
[[nodiscard]] double v_of_info(double info_nats, EntropyNats h);

/// H = (ln(2pi sigma^2) + 1) / 2.
[[nodiscard]] EntropyNats gaussian_entropy(double sigma);

/// exp(H - I) / sqrt(2pi e).
[[nodiscard]] double rmse_frontier_entropy(EntropyNats h, double info_nats);

/// sigma * exp(-I).
[[nodiscard]] double rmse_frontier_gaussian(double sigma, double info_nats);

/// Minimum information (nats) for which the Gaussian frontier reaches
/// target_rmse. Requires 0 < target_rmse <= sigma.
[[nodiscard]] double info_required_for_rmse(double sigma, double target_rmse);

/// Samples the frontier on a strictly increasing grid of non-negative
/// information values. Infinite grid values are allowed and give the
/// full-information limit.
[[nodiscard]] FrontierCurve frontier_curve(const FrontierSource& source, std::span<const double> info_grid);

// ---------------------------------------------------------------------------
// Value of Hartley information: best k-cell partition of the sample, scored by
// the mean within-cell squared deviation.

struct HartleyConfig {
    int max_iterations = 300;
    double relative_tolerance = 1e-10;
};

struct HartleyEstimate {
    std::size_t k = 1;
    double info_nats = 0.0;   // ln k
    double u_value = 0.0;     // -0.5 * mean squared distance to the assigned centroid
    double std_error = 0.0;   // standard error of u_value across samples
    int restarts = 1;
    std::uint64_t seed = 0;
    int best_restart = 0;
    int iterations = 0;       // Lloyd iterations used by the best restart
    std::vector<std::vector<double>> centroids;
};

/// Lloyd iterations from `restarts` seeded initializations (k distinct sample
/// points each); the best objective wins, ties broken by restart index.
/// Restart r is seeded from derive_seed(seed, r), so the restart set for a
/// smaller budget is a prefix of a larger one.
[[nodiscard]] HartleyEstimate hartley_value_estimate(const std::vector<std::vector<double>>& samples,
                                                     std::size_t k, int restarts, std::uint64_t seed,
                                                     const HartleyConfig& config = {});

/// Scalar convenience overload.
[[nodiscard]] HartleyEstimate hartley_value_estimate(std::span<const double> samples, std::size_t k,
                                                     int restarts, std::uint64_t seed,
                                                     const HartleyConfig& config = {});

}  // namespace voi
