#pragma once

#include "voi/dataset.hpp"
#include "voi/info.hpp"
#include "voi/models.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace voi {

/// Metrics of one rolling split. When `degenerate` is set (constant response
/// in the train or test rows) the model-dependent fields are NaN.
struct SplitMetrics {
    double rmse_train = 0.0;
    double rmse_test = 0.0;
    std::optional<double> corr_test;  // empty when either side has zero variance
    double mrr_test = 0.0;
    double mi_train_nats = 0.0;
    double mi_test_nats = 0.0;
    double sigma_train = 0.0;
    double sigma_test = 0.0;
    double mean_abs_test = 0.0;  // mean |actual| over test rows; bounds mrr_test
    bool degenerate = false;
    bool rank_deficient = false;  // LM fell back to the minimum-norm solution
    int pls_components = 0;
};

struct SplitEvaluation {
    SplitMetrics metrics;
    Eigen::VectorXd train_fitted;
    Eigen::VectorXd test_predicted;
};

struct CellAverages {
    double rmse_train = 0.0;
    double rmse_test = 0.0;
    double corr_test = 0.0;
    std::size_t corr_count = 0;  // splits with a defined correlation
    double mrr_test = 0.0;
    double mi_train_nats = 0.0;
    double mi_test_nats = 0.0;
    double sigma_train = 0.0;  // pooled: sqrt(mean sigma^2)
    double sigma_test = 0.0;
    std::size_t used_splits = 0;  // non-degenerate splits averaged
};

struct SweepCell {
    std::size_t m = 0;
    std::size_t n = 0;
    ModelKind model = ModelKind::LM;
    std::vector<SplitMetrics> splits;
    CellAverages averages;
    double frontier_rmse_train_sigma = 0.0;  // rmse_frontier_gaussian(sigma_train, mi_train_nats)
    double frontier_rmse_test_sigma = 0.0;   // rmse_frontier_gaussian(sigma_test, mi_train_nats)
};

struct BacktestConfig {
    std::string target;
    std::vector<std::size_t> m_values{1, 2, 3, 4, 5};
    std::vector<std::size_t> n_values = default_n_values();
    std::vector<ModelKind> models{ModelKind::LM, ModelKind::PLS, ModelKind::NN};
    TrainConfig train;
    int pls_components = 3;
    WindowConfig window;
    double shrinkage = kDefaultShrinkage;
    std::uint64_t master_seed = 0;
    unsigned threads = 1;

    static std::vector<std::size_t> default_n_values() {
        std::vector<std::size_t> v;
        for (std::size_t n = 2; n <= 20; ++n) v.push_back(n);
        return v;
    }
};

struct BacktestReport {
    BacktestConfig config;
    std::vector<std::string> symbols;  // panel column order; the first m are used per cell
    std::vector<SweepCell> cells;      // ordered by (model, m, n)
};

struct OverlayRow {
    std::size_t m = 0;
    std::size_t n = 0;
    ModelKind model = ModelKind::LM;
    double mi_nats = 0.0;
    double mi_bits = 0.0;
    double avg_rmse_test = 0.0;
    double frontier_rmse_train_sigma = 0.0;
    double frontier_rmse_test_sigma = 0.0;
    std::optional<double> avg_corr;
    double avg_mrr = 0.0;
};

/// exp(mean(sign(pred) * sign(actual) * |actual|)) - 1 with sign(0) = 0.
[[nodiscard]] double mrr(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// Pearson correlation; empty when either vector has zero variance.
[[nodiscard]] std::optional<double> correlation(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// Per-split seed: master XOR hash(m, n, model, split_index).
[[nodiscard]] std::uint64_t split_seed(std::uint64_t master, std::size_t m, std::size_t n, ModelKind model,
                                       std::size_t split_index);

/// Metrics from already-computed predictions. evaluate_split goes through
/// this, so persisted predictions reproduce its output exactly.
[[nodiscard]] SplitMetrics metrics_from_predictions(const LagDataset& dataset, const RollingSplit& split,
                                                    const Eigen::VectorXd& train_fitted,
                                                    const Eigen::VectorXd& test_predicted, double shrinkage);

/// Fits on the train rows only and scores the test rows.
[[nodiscard]] SplitEvaluation evaluate_split(const LagDataset& dataset, const RollingSplit& split, ModelKind model,
                                             const TrainConfig& train, int pls_components = 3,
                                             double shrinkage = kDefaultShrinkage);

/// Full (m, n, model) sweep. Column order of `panel` decides which symbols
/// enter for each m; the target must be among the first m.
[[nodiscard]] BacktestReport run_sweep(const ReturnsPanel& panel, const BacktestConfig& config);

[[nodiscard]] std::vector<OverlayRow> frontier_overlay(const BacktestReport& report);

// Serialization.
[[nodiscard]] nlohmann::json to_json(const BacktestConfig& config);
[[nodiscard]] BacktestConfig backtest_config_from_json(const nlohmann::json& doc, BacktestConfig defaults = {});
[[nodiscard]] nlohmann::json report_to_json(const BacktestReport& report);
[[nodiscard]] std::string overlay_to_csv(const std::vector<OverlayRow>& rows);

/// Structural check of a report document; returns a list of problems (empty when valid).
[[nodiscard]] std::vector<std::string> validate_report_json(const nlohmann::json& doc);

/// Shortest round-trip decimal form; "NaN"/"inf" for non-finite values.
[[nodiscard]] std::string format_number(double v);

}  // namespace voi
