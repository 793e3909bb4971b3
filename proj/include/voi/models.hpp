#pragma once

// Forecast models sharing one predict() contract: OLS, SIMPLS partial least
// squares, and a one-hidden-layer logistic network.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace voi {

struct LinearModel {
    double intercept = 0.0;
    Eigen::VectorXd coefficients;
    bool rank_deficient = false;  // minimum-norm solution was returned
    Eigen::Index rank = 0;
};

struct PlsModel {
    int n_components = 0;
    Eigen::VectorXd x_mean;
    double y_mean = 0.0;
    Eigen::MatrixXd weight_matrix;      // p x c; centered x * weights = orthonormal scores
    Eigen::VectorXd y_loadings;         // c inner-regression coefficients
    Eigen::VectorXd regression_vector;  // weight_matrix * y_loadings
    double intercept = 0.0;
};

struct NeuralNet {
    Eigen::MatrixXd hidden_weights;  // hidden x p
    Eigen::VectorXd hidden_bias;
    Eigen::VectorXd output_weights;
    double output_bias = 0.0;
    Eigen::VectorXd x_mean;
    Eigen::VectorXd x_scale;
    double y_mean = 0.0;
    double y_scale = 1.0;
    std::uint64_t seed = 0;

    [[nodiscard]] Eigen::Index input_dim() const { return hidden_weights.cols(); }
    [[nodiscard]] Eigen::Index hidden_dim() const { return hidden_weights.rows(); }
};

/// Gradient of the batch loss, laid out like the NeuralNet parameters.
struct NeuralNetGradient {
    Eigen::MatrixXd hidden_weights;
    Eigen::VectorXd hidden_bias;
    Eigen::VectorXd output_weights;
    double output_bias = 0.0;
};

struct TrainConfig {
    int epochs = 30;
    int hidden_units = 3;
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
};

struct PlsFit {
    PlsModel model;
    Eigen::VectorXd fitted;  // from the score/loading route
    Eigen::MatrixXd scores;  // N x c
};

struct NnFit {
    NeuralNet net;
    Eigen::VectorXd fitted;          // final parameters applied to the training rows
    std::vector<double> epoch_loss;  // standardized training MSE after each epoch
};

enum class ModelKind { LM, PLS, NN };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] ModelKind model_kind_from_string(const std::string& name);

using ForecastModel = std::variant<LinearModel, PlsModel, NeuralNet>;

[[nodiscard]] LinearModel ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

[[nodiscard]] PlsFit simpls_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int n_components = 3);

/// Scores of (x - x_mean) on the model's weights.
[[nodiscard]] Eigen::MatrixXd pls_scores(const PlsModel& model, const Eigen::MatrixXd& x);

[[nodiscard]] NnFit nn_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const TrainConfig& config = {});

/// Mean squared error of the network on a batch, measured in the network's
/// standardized response units. This is the training objective.
[[nodiscard]] double nn_batch_loss(const NeuralNet& net, const Eigen::MatrixXd& x_batch, const Eigen::VectorXd& y_batch);

/// Exact gradient of nn_batch_loss with respect to every parameter.
[[nodiscard]] NeuralNetGradient nn_gradient(const NeuralNet& net, const Eigen::MatrixXd& x_batch,
                                            const Eigen::VectorXd& y_batch);

[[nodiscard]] Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& x);
[[nodiscard]] Eigen::VectorXd predict(const PlsModel& model, const Eigen::MatrixXd& x);
[[nodiscard]] Eigen::VectorXd predict(const NeuralNet& net, const Eigen::MatrixXd& x);
[[nodiscard]] Eigen::VectorXd predict(const ForecastModel& model, const Eigen::MatrixXd& x);

[[nodiscard]] Eigen::Index input_dim(const ForecastModel& model);

// Versioned JSON documents: {"schema_version": 1, "kind": "LM"|"PLS"|"NN", ...}.
inline constexpr int kModelSchemaVersion = 1;

[[nodiscard]] nlohmann::json model_to_json(const ForecastModel& model);
[[nodiscard]] ForecastModel model_from_json(const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const TrainConfig& config);
[[nodiscard]] TrainConfig train_config_from_json(const nlohmann::json& doc, TrainConfig defaults = {});

}  // namespace voi
