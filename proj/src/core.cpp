#include "voi/core.hpp"

#include "voi/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace voi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLnTwoPi = 1.8378770664093454835606594728112353;

void require_info(double info_nats) {
    if (!(info_nats >= 0.0)) {
        throw DomainError("information must be >= 0 nats, got " + std::to_string(info_nats));
    }
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be positive and finite, got " + std::to_string(sigma));
    }
}

}  // namespace

InverseTemperature::InverseTemperature(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw DomainError("inverse temperature must be positive and finite, got " + std::to_string(beta));
    }
}

double gamma0_quadratic(InverseTemperature beta) {
    return 0.5 * std::log(kTwoPi / beta.value());
}

double u_of_beta(InverseTemperature beta) {
    return -0.5 / beta.value();
}

double i_of_beta(InverseTemperature beta, EntropyNats h) {
    return h.value - 0.5 * (kLnTwoPi + 1.0 - std::log(beta.value()));
}

InverseTemperature beta_of_info(double info_nats, EntropyNats h) {
    require_info(info_nats);
    return InverseTemperature(kTwoPi * std::exp(2.0 * (info_nats - h.value) + 1.0));
}

double u_of_info(double info_nats, EntropyNats h) {
    require_info(info_nats);
    return -std::exp(2.0 * (h.value - info_nats) - 1.0) / (2.0 * kTwoPi);
}

double v_of_info(double info_nats, EntropyNats h) {
    require_info(info_nats);
    // (1/4pi) e^{2H-1} (1 - e^{-2I}); expm1 keeps V(0) = 0 exactly.
    return -std::expm1(-2.0 * info_nats) * std::exp(2.0 * h.value - 1.0) / (2.0 * kTwoPi);
}

EntropyNats gaussian_entropy(double sigma) {
    require_sigma(sigma);
    return EntropyNats{0.5 * (kLnTwoPi + 2.0 * std::log(sigma) + 1.0)};
}

double rmse_frontier_entropy(EntropyNats h, double info_nats) {
    require_info(info_nats);
    return std::exp(h.value - info_nats) / std::sqrt(kTwoPi * std::numbers::e);
}

double rmse_frontier_gaussian(double sigma, double info_nats) {
    require_sigma(sigma);
    require_info(info_nats);
    return sigma * std::exp(-info_nats);
}

double info_required_for_rmse(double sigma, double target_rmse) {
    require_sigma(sigma);
    if (!(target_rmse > 0.0)) {
        throw DomainError("target RMSE must be positive (zero error needs infinite information)");
    }
    if (target_rmse > sigma) {
        throw DomainError("target RMSE exceeds sigma; the prior mean already achieves it");
    }
    return std::log(sigma / target_rmse);
}

FrontierCurve frontier_curve(const FrontierSource& source, std::span<const double> info_grid) {
    if (info_grid.empty()) {
        throw DomainError("frontier grid is empty");
    }
    for (std::size_t i = 0; i < info_grid.size(); ++i) {
        require_info(info_grid[i]);
        if (i > 0 && !(info_grid[i] > info_grid[i - 1])) {
            throw DomainError("frontier grid must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }

    FrontierCurve curve{source, {}};
    curve.points.reserve(info_grid.size());
    for (const double info : info_grid) {
        FrontierPoint p;
        p.info_nats = info;
        if (const auto* s = std::get_if<SigmaSource>(&source)) {
            require_sigma(s->sigma);
            const double var = s->sigma * s->sigma;
            p.u_value = -0.5 * var * std::exp(-2.0 * info);
            p.v_value = -0.5 * var * std::expm1(-2.0 * info);
            p.rmse = rmse_frontier_gaussian(s->sigma, info);
        } else {
            const auto h = std::get<EntropyNats>(source);
            p.u_value = u_of_info(info, h);
            p.v_value = v_of_info(info, h);
            p.rmse = rmse_frontier_entropy(h, info);
        }
        curve.points.push_back(p);
    }
    return curve;
}

}  // namespace voi
