#include "voi/errors.hpp"
#include "voi/models.hpp"
#include "voi/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace voi {

namespace {

struct Standardized {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Standardized standardize(const NeuralNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Standardized s;
    s.x = (x.rowwise() - net.x_mean.transpose()).array().rowwise() / net.x_scale.transpose().array();
    s.y = (y.array() - net.y_mean) / net.y_scale;
    return s;
}

Eigen::MatrixXd hidden_activations(const NeuralNet& net, const Eigen::MatrixXd& xs) {
    Eigen::MatrixXd a = xs * net.hidden_weights.transpose();
    a.rowwise() += net.hidden_bias.transpose();
    return (1.0 + (-a.array()).exp()).inverse().matrix();
}

Eigen::VectorXd forward_standardized(const NeuralNet& net, const Eigen::MatrixXd& xs) {
    Eigen::VectorXd out = hidden_activations(net, xs) * net.output_weights;
    out.array() += net.output_bias;
    return out;
}

void check_batch(const NeuralNet& net, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const char* who) {
    if (x.rows() == 0) throw DataError(std::string(who) + ": empty batch");
    if (x.rows() != y.size()) throw DataError(std::string(who) + ": x and y row counts differ");
    if (x.cols() != net.input_dim()) {
        throw DataError(std::string(who) + ": expected " + std::to_string(net.input_dim()) + " columns, got " +
                        std::to_string(x.cols()));
    }
}

NeuralNetGradient gradient_standardized(const NeuralNet& net, const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys) {
    const Eigen::MatrixXd h = hidden_activations(net, xs);
    Eigen::VectorXd out = h * net.output_weights;
    out.array() += net.output_bias;
    // d(mean sq err)/d(out_i)
    const Eigen::VectorXd delta = 2.0 * (out - ys) / static_cast<double>(xs.rows());

    NeuralNetGradient g;
    g.output_weights = h.transpose() * delta;
    g.output_bias = delta.sum();
    const Eigen::MatrixXd delta_hidden =
        ((delta * net.output_weights.transpose()).array() * h.array() * (1.0 - h.array())).matrix();
    g.hidden_weights = delta_hidden.transpose() * xs;
    g.hidden_bias = delta_hidden.colwise().sum().transpose();
    return g;
}

}  // namespace

double nn_batch_loss(const NeuralNet& net, const Eigen::MatrixXd& x_batch, const Eigen::VectorXd& y_batch) {
    check_batch(net, x_batch, y_batch, "nn_batch_loss");
    const Standardized s = standardize(net, x_batch, y_batch);
    return (forward_standardized(net, s.x) - s.y).squaredNorm() / static_cast<double>(x_batch.rows());
}

NeuralNetGradient nn_gradient(const NeuralNet& net, const Eigen::MatrixXd& x_batch, const Eigen::VectorXd& y_batch) {
    check_batch(net, x_batch, y_batch, "nn_gradient");
    const Standardized s = standardize(net, x_batch, y_batch);
    return gradient_standardized(net, s.x, s.y);
}

Eigen::VectorXd predict(const NeuralNet& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.input_dim()) {
        throw DataError("predict(NN): expected " + std::to_string(net.input_dim()) + " columns, got " +
                        std::to_string(x.cols()));
    }
    const Eigen::MatrixXd xs = (x.rowwise() - net.x_mean.transpose()).array().rowwise() / net.x_scale.transpose().array();
    return (forward_standardized(net, xs).array() * net.y_scale + net.y_mean).matrix();
}

NnFit nn_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& config) {
    if (x.rows() != y.size()) throw DataError("nn_fit: x and y row counts differ");
    if (!x.allFinite() || !y.allFinite()) throw DataError("nn_fit: non-finite inputs");
    if (config.epochs < 1 || config.hidden_units < 1 || config.batch_size < 1 || !(config.learning_rate > 0.0)) {
        throw DomainError("nn_fit: epochs, hidden_units, batch_size and learning_rate must be positive");
    }
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (p < 1) throw DataError("nn_fit: no input columns");
    if (static_cast<std::size_t>(n) < config.batch_size) {
        throw DomainError("nn_fit: " + std::to_string(n) + " rows is fewer than batch_size " +
                          std::to_string(config.batch_size));
    }

    NeuralNet net;
    net.seed = config.seed;
    net.x_mean = x.colwise().mean().transpose();
    net.x_scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double sd = n > 1 ? std::sqrt((x.col(j).array() - net.x_mean(j)).square().sum() / static_cast<double>(n - 1)) : 0.0;
        net.x_scale(j) = sd > 0.0 ? sd : 1.0;
    }
    net.y_mean = y.mean();
    const double y_sd = n > 1 ? std::sqrt((y.array() - net.y_mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
    net.y_scale = y_sd > 0.0 ? y_sd : 1.0;

    // Uniform init in +-1/sqrt(fan_in).
    const Eigen::Index hidden = config.hidden_units;
    Rng init(derive_seed(config.seed, 0));
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(p));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    net.hidden_weights.resize(hidden, p);
    for (Eigen::Index i = 0; i < hidden; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) net.hidden_weights(i, j) = init.uniform(-in_bound, in_bound);
    }
    net.hidden_bias.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) net.hidden_bias(i) = init.uniform(-in_bound, in_bound);
    net.output_weights.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) net.output_weights(i) = init.uniform(-out_bound, out_bound);
    net.output_bias = init.uniform(-out_bound, out_bound);
    if (!(y_sd > 0.0)) {
        // Constant response: start the output layer at the bias-only optimum,
        // where every gradient vanishes and the epochs leave it in place.
        net.output_weights.setZero();
        net.output_bias = 0.0;
    }

    const Standardized s = standardize(net, x, y);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    const auto batch = static_cast<Eigen::Index>(config.batch_size);

    NnFit fit;
    fit.epoch_loss.reserve(static_cast<std::size_t>(config.epochs));
    Eigen::MatrixXd xb;
    Eigen::VectorXd yb;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        Rng shuffler(derive_seed(config.seed, 1, static_cast<std::uint64_t>(epoch)));
        shuffler.shuffle(std::span<Eigen::Index>(order));

        for (Eigen::Index start = 0; start < n; start += batch) {
            const Eigen::Index len = std::min(batch, n - start);
            xb.resize(len, p);
            yb.resize(len);
            for (Eigen::Index i = 0; i < len; ++i) {
                const Eigen::Index row = order[static_cast<std::size_t>(start + i)];
                xb.row(i) = s.x.row(row);
                yb(i) = s.y(row);
            }
            const NeuralNetGradient g = gradient_standardized(net, xb, yb);
            net.hidden_weights -= config.learning_rate * g.hidden_weights;
            net.hidden_bias -= config.learning_rate * g.hidden_bias;
            net.output_weights -= config.learning_rate * g.output_weights;
            net.output_bias -= config.learning_rate * g.output_bias;
        }

        const double loss = (forward_standardized(net, s.x) - s.y).squaredNorm() / static_cast<double>(n);
        if (!std::isfinite(loss)) {
            throw NumericalError("nn_fit: non-finite training loss at epoch " + std::to_string(epoch + 1));
        }
        fit.epoch_loss.push_back(loss);
    }

    fit.fitted = predict(net, x);
    fit.net = std::move(net);
    return fit;
}

}  // namespace voi
