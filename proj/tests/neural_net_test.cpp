#include "voi/errors.hpp"
#include "voi/models.hpp"
#include "voi/rng.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace voi;

namespace {

NeuralNet random_net(Eigen::Index p, Eigen::Index hidden, std::uint64_t seed) {
    NeuralNet net;
    net.hidden_weights = oracle::gaussian_matrix(hidden, p, seed);
    net.hidden_bias = oracle::gaussian_matrix(hidden, 1, seed + 1).col(0);
    net.output_weights = oracle::gaussian_matrix(hidden, 1, seed + 2).col(0);
    net.output_bias = oracle::gaussian_matrix(1, 1, seed + 3)(0, 0);
    net.x_mean = oracle::gaussian_matrix(p, 1, seed + 4).col(0);
    net.x_scale = (oracle::gaussian_matrix(p, 1, seed + 5).col(0).array().abs() + 0.5).matrix();
    net.y_mean = 0.3;
    net.y_scale = 1.7;
    return net;
}

// Applies f to every scalar parameter with its analytic counterpart.
void for_each_parameter(NeuralNet& net, const NeuralNetGradient& g,
                        const std::function<void(double& param, double analytic, const std::string& name)>& f) {
    for (Eigen::Index i = 0; i < net.hidden_weights.rows(); ++i) {
        for (Eigen::Index j = 0; j < net.hidden_weights.cols(); ++j) {
            f(net.hidden_weights(i, j), g.hidden_weights(i, j), "W(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    for (Eigen::Index i = 0; i < net.hidden_bias.size(); ++i) f(net.hidden_bias(i), g.hidden_bias(i), "b1");
    for (Eigen::Index i = 0; i < net.output_weights.size(); ++i) f(net.output_weights(i), g.output_weights(i), "w2");
    f(net.output_bias, g.output_bias, "b2");
}

// Largest relative error between analytic and central-difference gradients.
double max_gradient_error(NeuralNet net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double step = 1e-5) {
    const auto g = nn_gradient(net, x, y);
    double worst = 0.0;
    for_each_parameter(net, g, [&](double& param, double analytic, const std::string&) {
        const double saved = param;
        param = saved + step;
        const double up = nn_batch_loss(net, x, y);
        param = saved - step;
        const double down = nn_batch_loss(net, x, y);
        param = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-7});
        worst = std::max(worst, std::abs(analytic - numeric) / scale);
    });
    return worst;
}

}  // namespace

TEST(NnGradient, MatchesFiniteDifferencesSeed7) {
    const NeuralNet net = random_net(3, 3, 7);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(5, 3, 70);
    const Eigen::VectorXd y = oracle::gaussian_matrix(5, 1, 71).col(0);
    EXPECT_LE(max_gradient_error(net, x, y), 1e-6);
}

TEST(NnGradient, MatchesFiniteDifferencesOnRandomInstances) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(s);
        const auto p = static_cast<Eigen::Index>(1 + rng.below(6));
        const auto n = static_cast<Eigen::Index>(1 + rng.below(12));
        const NeuralNet net = random_net(p, 3, 1000 + 10 * s);
        const Eigen::MatrixXd x = oracle::gaussian_matrix(n, p, 2000 + s);
        const Eigen::VectorXd y = oracle::gaussian_matrix(n, 1, 3000 + s).col(0);
        EXPECT_LE(max_gradient_error(net, x, y), 1e-6) << "instance " << s;
    }
}

TEST(NnGradient, ZeroOutputWeightsCutHiddenGradients) {
    NeuralNet net = random_net(4, 3, 8);
    net.output_weights.setZero();
    const Eigen::MatrixXd x = oracle::gaussian_matrix(6, 4, 80);
    const Eigen::VectorXd y = oracle::gaussian_matrix(6, 1, 81).col(0);
    const auto g = nn_gradient(net, x, y);
    EXPECT_EQ(g.hidden_weights.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.hidden_bias.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(g.output_weights.cwiseAbs().maxCoeff(), 0.0);
}

TEST(NnGradient, DuplicatedRowsLeaveGradientUnchanged) {
    const NeuralNet net = random_net(3, 3, 9);
    const Eigen::MatrixXd x = oracle::gaussian_matrix(4, 3, 90);
    const Eigen::VectorXd y = oracle::gaussian_matrix(4, 1, 91).col(0);
    Eigen::MatrixXd x2(8, 3);
    x2 << x, x;
    Eigen::VectorXd y2(8);
    y2 << y, y;
    const auto a = nn_gradient(net, x, y);
    const auto b = nn_gradient(net, x2, y2);
    EXPECT_LE((a.hidden_weights - b.hidden_weights).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((a.hidden_bias - b.hidden_bias).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((a.output_weights - b.output_weights).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(a.output_bias, b.output_bias, 1e-14);
}

TEST(NnGradient, ShapeMismatchIsError) {
    const NeuralNet net = random_net(3, 3, 10);
    EXPECT_THROW((void)nn_gradient(net, Eigen::MatrixXd::Ones(2, 4), Eigen::VectorXd::Ones(2)), DataError);
    EXPECT_THROW((void)nn_gradient(net, Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(3)), DataError);
    EXPECT_THROW((void)nn_gradient(net, Eigen::MatrixXd::Ones(0, 3), Eigen::VectorXd::Ones(0)), DataError);
}

TEST(NnFit, DeterministicForSeed) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(100, 4, 11);
    const Eigen::VectorXd y = oracle::gaussian_matrix(100, 1, 12).col(0);
    const TrainConfig cfg{30, 3, 0.05, 16, 42};
    const auto a = nn_fit(x, y, cfg);
    const auto b = nn_fit(x, y, cfg);
    EXPECT_EQ(a.net.hidden_weights, b.net.hidden_weights);
    EXPECT_EQ(a.net.hidden_bias, b.net.hidden_bias);
    EXPECT_EQ(a.net.output_weights, b.net.output_weights);
    EXPECT_EQ(a.net.output_bias, b.net.output_bias);
    EXPECT_EQ(a.epoch_loss, b.epoch_loss);
    EXPECT_EQ(a.net.seed, 42u);
    const auto c = nn_fit(x, y, TrainConfig{30, 3, 0.05, 16, 43});
    EXPECT_NE(a.net.hidden_weights, c.net.hidden_weights);
}

TEST(NnFit, ArchitectureAndEpochs) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(64, 5, 13);
    const Eigen::VectorXd y = oracle::gaussian_matrix(64, 1, 14).col(0);
    const auto fit = nn_fit(x, y);
    EXPECT_EQ(fit.net.hidden_dim(), 3);
    EXPECT_EQ(fit.net.input_dim(), 5);
    EXPECT_EQ(fit.epoch_loss.size(), 30u);
}

TEST(NnFit, ConstantResponse) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(100, 3, 15);
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(100, 0.25);
    const auto fit = nn_fit(x, y);
    EXPECT_LE(fit.epoch_loss.back(), 1e-6);
    EXPECT_LE((predict(fit.net, x).array() - 0.25).abs().maxCoeff(), 1e-3);
}

TEST(NnFit, BeatsBestAffineFitOnXor) {
    Rng rng(16);
    const Eigen::Index n = 1000;
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i, 0) = rng.uniform(-1.0, 1.0);
        x(i, 1) = rng.uniform(-1.0, 1.0);
        y(i) = (x(i, 0) > 0.0) == (x(i, 1) > 0.0) ? 1.0 : -1.0;
    }
    const double affine_mse = (predict(ols_fit(x, y), x) - y).squaredNorm() / n;
    const auto fit = nn_fit(x, y, TrainConfig{30, 3, 0.05, 16, 5});
    const double nn_mse = (fit.fitted - y).squaredNorm() / n;
    EXPECT_LT(nn_mse, affine_mse);
}

TEST(NnFit, PredictReproducesFittedValues) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(50, 3, 17);
    const Eigen::VectorXd y = oracle::gaussian_matrix(50, 1, 18).col(0);
    const auto fit = nn_fit(x, y);
    EXPECT_LE((predict(fit.net, x) - fit.fitted).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((predict(ForecastModel{fit.net}, x) - fit.fitted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NnFit, TrainingRmseBelowSdOnAverage) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(100, 4, 19);
    const Eigen::VectorXd y = (0.8 * x.col(0)).array().tanh().matrix() + 0.5 * oracle::gaussian_matrix(100, 1, 20).col(0);
    const double sd = std::sqrt((y.array() - y.mean()).square().mean());
    double mean_rmse = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto fit = nn_fit(x, y, TrainConfig{30, 3, 0.05, 16, s});
        mean_rmse += std::sqrt((fit.fitted - y).squaredNorm() / 100.0) / 10.0;
    }
    EXPECT_LE(mean_rmse, sd);
}

TEST(NnFit, Errors) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(10, 2, 21);
    const Eigen::VectorXd y = oracle::gaussian_matrix(10, 1, 22).col(0);
    EXPECT_THROW((void)nn_fit(x, y, TrainConfig{30, 3, 0.05, 16, 0}), DomainError);
    EXPECT_THROW((void)nn_fit(x, y, TrainConfig{30, 3, -0.1, 4, 0}), DomainError);
    EXPECT_THROW((void)nn_fit(x, Eigen::VectorXd::Ones(9), TrainConfig{30, 3, 0.05, 4, 0}), DataError);
    EXPECT_THROW((void)nn_fit(x, y, TrainConfig{30, 3, 1e300, 4, 0}), NumericalError);
    const auto fit = nn_fit(x, y, TrainConfig{3, 3, 0.05, 4, 0});
    EXPECT_THROW((void)predict(fit.net, Eigen::MatrixXd::Ones(2, 3)), DataError);
}
