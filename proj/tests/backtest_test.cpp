#include "voi/backtest.hpp"
#include "voi/core.hpp"
#include "voi/errors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

using namespace voi;

namespace {

ReturnsPanel make_panel(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    ReturnsPanel p;
    p.returns = 0.03 * oracle::gaussian_matrix(rows, cols, seed);
    for (Eigen::Index j = 0; j < cols; ++j) p.symbols.push_back("S" + std::to_string(j));
    std::chrono::sys_days day{std::chrono::year{2020} / 1 / 1};
    for (Eigen::Index i = 0; i < rows; ++i) {
        p.dates.push_back(Date{day});
        day += std::chrono::days{1};
    }
    return p;
}

LagDataset make_dataset(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    LagDataset ds;
    ds.predictors = x;
    ds.response = y;
    ds.m = 1;
    ds.n = static_cast<std::size_t>(x.cols());
    ds.target_symbol = "S0";
    ds.symbols = {"S0"};
    return ds;
}

BacktestConfig small_config(const std::string& target) {
    BacktestConfig c;
    c.target = target;
    c.m_values = {1, 2};
    c.n_values = {2, 3};
    c.train.epochs = 5;
    return c;
}

}  // namespace

TEST(Mrr, Examples) {
    const Eigen::Vector4d actual(0.01, -0.01, 0.01, -0.01);
    EXPECT_NEAR(mrr(actual, actual), std::expm1(0.01), 1e-15);
    EXPECT_NEAR(mrr(actual, actual), 0.010050167, 1e-9);
    EXPECT_NEAR(mrr(-actual, actual), std::expm1(-0.01), 1e-15);
    EXPECT_NEAR(mrr(-actual, actual), -0.009950166, 1e-9);
    EXPECT_EQ(mrr(Eigen::Vector4d::Zero(), actual), 0.0);
    EXPECT_THROW((void)mrr(Eigen::VectorXd(0), Eigen::VectorXd(0)), DataError);
    EXPECT_THROW((void)mrr(Eigen::Vector2d(1, 2), Eigen::Vector3d(1, 2, 3)), DataError);
}

TEST(Mrr, BoundedByMeanAbsoluteReturn) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const Eigen::VectorXd a = 0.05 * oracle::gaussian_matrix(25, 1, s).col(0);
        const Eigen::VectorXd p = oracle::gaussian_matrix(25, 1, 500 + s).col(0);
        const double bound = a.cwiseAbs().mean();
        const double v = mrr(p, a);
        EXPECT_GE(v, std::expm1(-bound) - 1e-15);
        EXPECT_LE(v, std::expm1(bound) + 1e-15);
    }
}

TEST(Correlation, Examples) {
    const Eigen::VectorXd a = oracle::gaussian_matrix(30, 1, 1).col(0);
    EXPECT_NEAR(*correlation(a, a), 1.0, 1e-14);
    EXPECT_NEAR(*correlation(-a, a), -1.0, 1e-14);
    EXPECT_NEAR(*correlation((2.0 * a).array() + 5.0, a), 1.0, 1e-14);
    EXPECT_FALSE(correlation(Eigen::VectorXd::Constant(30, 1.0), a).has_value());
    EXPECT_FALSE(correlation(a, Eigen::VectorXd::Constant(30, 1.0)).has_value());
    EXPECT_THROW((void)correlation(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)), DataError);
}

TEST(SplitSeed, DependsOnEveryCounter) {
    const auto base = split_seed(0, 1, 2, ModelKind::NN, 0);
    EXPECT_NE(base, split_seed(1, 1, 2, ModelKind::NN, 0));
    EXPECT_NE(base, split_seed(0, 2, 2, ModelKind::NN, 0));
    EXPECT_NE(base, split_seed(0, 1, 3, ModelKind::NN, 0));
    EXPECT_NE(base, split_seed(0, 1, 2, ModelKind::LM, 0));
    EXPECT_NE(base, split_seed(0, 1, 2, ModelKind::NN, 1));
    EXPECT_EQ(base, split_seed(0, 1, 2, ModelKind::NN, 0));
}

TEST(EvaluateSplit, PerfectLinearSignal) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(200, 3, 2);
    const auto ds = make_dataset(x, x.col(1));
    const RollingSplit split{{0, 100}, {100, 200}};
    const auto ev = evaluate_split(ds, split, ModelKind::LM, TrainConfig{});
    EXPECT_LE(ev.metrics.rmse_test, 1e-10);
    EXPECT_LE(ev.metrics.rmse_train, 1e-10);
    ASSERT_TRUE(ev.metrics.corr_test.has_value());
    EXPECT_NEAR(*ev.metrics.corr_test, 1.0, 1e-10);
    EXPECT_FALSE(ev.metrics.degenerate);
}

TEST(EvaluateSplit, PureNoiseHasNoCorrelation) {
    const Eigen::MatrixXd g = oracle::gaussian_matrix(5100, 3, 3);
    const auto ds = make_dataset(g.leftCols(2), g.col(2));
    const RollingSplit split{{0, 100}, {100, 5100}};
    const auto ev = evaluate_split(ds, split, ModelKind::LM, TrainConfig{});
    ASSERT_TRUE(ev.metrics.corr_test.has_value());
    EXPECT_LE(std::abs(*ev.metrics.corr_test), 3.0 / std::sqrt(5000.0));
}

TEST(EvaluateSplit, MetricsReproduceFromPredictions) {
    const Eigen::MatrixXd g = oracle::gaussian_matrix(125, 5, 4);
    const auto ds = make_dataset(g.leftCols(4), g.col(4));
    const RollingSplit split{{0, 100}, {100, 125}};
    for (const auto kind : {ModelKind::LM, ModelKind::PLS, ModelKind::NN}) {
        const auto ev = evaluate_split(ds, split, kind, TrainConfig{30, 3, 0.05, 16, 9});
        const auto again = metrics_from_predictions(ds, split, ev.train_fitted, ev.test_predicted, kDefaultShrinkage);
        EXPECT_EQ(again.rmse_train, ev.metrics.rmse_train);
        EXPECT_EQ(again.rmse_test, ev.metrics.rmse_test);
        EXPECT_EQ(again.corr_test, ev.metrics.corr_test);
        EXPECT_EQ(again.mrr_test, ev.metrics.mrr_test);
        EXPECT_EQ(again.mi_train_nats, ev.metrics.mi_train_nats);
        EXPECT_EQ(again.mi_test_nats, ev.metrics.mi_test_nats);
        EXPECT_EQ(again.sigma_train, ev.metrics.sigma_train);
        EXPECT_EQ(again.sigma_test, ev.metrics.sigma_test);
    }
}

TEST(EvaluateSplit, FieldsMatchDirectComputation) {
    const Eigen::MatrixXd g = oracle::gaussian_matrix(125, 3, 5);
    const auto ds = make_dataset(g.leftCols(2), g.col(2));
    const RollingSplit split{{0, 100}, {100, 125}};
    const auto ev = evaluate_split(ds, split, ModelKind::LM, TrainConfig{});
    const Eigen::VectorXd ytr = g.col(2).head(100);
    const Eigen::VectorXd yte = g.col(2).tail(25);
    EXPECT_NEAR(ev.metrics.rmse_test, std::sqrt((ev.test_predicted - yte).squaredNorm() / 25.0), 1e-15);
    EXPECT_NEAR(ev.metrics.mi_train_nats, gaussian_mi(g.topLeftCorner(100, 2), ytr).nats, 1e-15);
    EXPECT_GT(ev.metrics.sigma_train, 0.5);
    EXPECT_NEAR(ev.metrics.mean_abs_test, yte.cwiseAbs().mean(), 1e-15);
    EXPECT_GE(ev.metrics.mrr_test, std::expm1(-ev.metrics.mean_abs_test));
    EXPECT_LE(ev.metrics.mrr_test, std::expm1(ev.metrics.mean_abs_test));
}

TEST(EvaluateSplit, ConstantResponseIsFlaggedDegenerate) {
    const Eigen::MatrixXd x = oracle::gaussian_matrix(125, 2, 6);
    const auto ds = make_dataset(x, Eigen::VectorXd::Zero(125));
    const auto ev = evaluate_split(ds, RollingSplit{{0, 100}, {100, 125}}, ModelKind::LM, TrainConfig{});
    EXPECT_TRUE(ev.metrics.degenerate);
    EXPECT_TRUE(std::isnan(ev.metrics.rmse_test));
    EXPECT_FALSE(ev.metrics.corr_test.has_value());
}

TEST(EvaluateSplit, SplitOutOfBoundsIsError) {
    const Eigen::MatrixXd g = oracle::gaussian_matrix(110, 3, 7);
    const auto ds = make_dataset(g.leftCols(2), g.col(2));
    EXPECT_THROW((void)evaluate_split(ds, RollingSplit{{0, 100}, {100, 125}}, ModelKind::LM, TrainConfig{}), DataError);
}

TEST(RunSweep, DefaultWindowSplitCount) {
    BacktestConfig c;
    c.target = "S0";
    c.m_values = {1};
    c.n_values = {2, 5};
    c.models = {ModelKind::LM};
    for (const std::size_t n : c.n_values) {
        BacktestConfig one = c;
        one.n_values = {n};
        const auto report = run_sweep(make_panel(static_cast<Eigen::Index>(700 + n), 1, 8), one);
        ASSERT_EQ(report.cells.size(), 1u);
        EXPECT_EQ(report.cells[0].splits.size(), 24u);
    }
}

TEST(RunSweep, SingletonGrid) {
    BacktestConfig c;
    c.target = "S0";
    c.m_values = {1};
    c.n_values = {2};
    c.models = {ModelKind::LM};
    const auto report = run_sweep(make_panel(200, 3, 9), c);
    ASSERT_EQ(report.cells.size(), 1u);
    EXPECT_EQ(report.cells[0].m, 1u);
    EXPECT_EQ(report.cells[0].n, 2u);
    EXPECT_EQ(report.cells[0].model, ModelKind::LM);
}

TEST(RunSweep, DeterministicAcrossRunsAndThreadCounts) {
    const auto panel = make_panel(260, 2, 10);
    auto c = small_config("S0");
    c.master_seed = 77;
    const auto a = report_to_json(run_sweep(panel, c)).dump();
    const auto b = report_to_json(run_sweep(panel, c)).dump();
    c.threads = 4;
    const auto threaded = report_to_json(run_sweep(panel, c));
    EXPECT_EQ(a, b);
    auto t = threaded;
    t["config"]["threads"] = 1;
    EXPECT_EQ(a, t.dump());
}

TEST(RunSweep, CellInvariants) {
    const auto panel = make_panel(300, 2, 11);
    const auto report = run_sweep(panel, small_config("S0"));
    ASSERT_EQ(report.cells.size(), 12u);
    for (const auto& cell : report.cells) {
        EXPECT_EQ(cell.splits.size(), (300 - cell.n - 100) / 25);
        double mi_sum = 0.0;
        for (const auto& s : cell.splits) {
            EXPECT_GE(s.mrr_test, std::expm1(-s.mean_abs_test));
            EXPECT_LE(s.mrr_test, std::expm1(s.mean_abs_test));
            EXPECT_GE(s.mi_train_nats, 0.0);
            if (cell.model != ModelKind::NN) EXPECT_LE(s.rmse_train, s.sigma_train + 1e-12);
            mi_sum += s.mi_train_nats;
        }
        EXPECT_NEAR(cell.averages.mi_train_nats, mi_sum / static_cast<double>(cell.splits.size()), 1e-15);
        EXPECT_EQ(cell.averages.used_splits, cell.splits.size());
        EXPECT_DOUBLE_EQ(cell.frontier_rmse_train_sigma,
                         rmse_frontier_gaussian(cell.averages.sigma_train, cell.averages.mi_train_nats));
        EXPECT_DOUBLE_EQ(cell.frontier_rmse_test_sigma,
                         rmse_frontier_gaussian(cell.averages.sigma_test, cell.averages.mi_train_nats));
    }
}

TEST(RunSweep, Errors) {
    const auto panel = make_panel(300, 2, 12);
    EXPECT_THROW((void)run_sweep(panel, small_config("S1")), ConfigError);
    EXPECT_THROW((void)run_sweep(panel, small_config("S9")), ConfigError);
    auto c = small_config("S0");
    c.n_values = {2, 180};
    try {
        (void)run_sweep(panel, c);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("n = 180"), std::string::npos) << e.what();
    }
}

TEST(FrontierOverlay, ZeroInformationGivesSigma) {
    BacktestReport r;
    SweepCell cell;
    cell.m = 1;
    cell.n = 2;
    cell.averages.sigma_train = 0.0386;
    cell.averages.sigma_test = 0.0361;
    cell.averages.mi_train_nats = 0.0;
    cell.averages.used_splits = 1;
    r.cells.push_back(cell);
    const auto rows = frontier_overlay(r);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].frontier_rmse_train_sigma, 0.0386);
    EXPECT_DOUBLE_EQ(rows[0].frontier_rmse_test_sigma, 0.0361);
}

TEST(FrontierOverlay, SortedAndConsistent) {
    const auto report = run_sweep(make_panel(250, 2, 13), small_config("S0"));
    const auto rows = frontier_overlay(report);
    ASSERT_EQ(rows.size(), report.cells.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto key = [](const OverlayRow& r) { return std::tuple(static_cast<int>(r.model), r.m, r.n); };
        EXPECT_LT(key(rows[i - 1]), key(rows[i]));
    }
    for (const auto& row : rows) {
        EXPECT_NEAR(row.mi_bits, row.mi_nats / std::log(2.0), 1e-15);
        EXPECT_GE(row.frontier_rmse_train_sigma, 0.0);
    }
    const auto csv = overlay_to_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "m,n,model,mi_nats,mi_bits,avg_rmse_test,frontier_rmse_train_sigma,frontier_rmse_test_sigma,avg_corr,avg_mrr");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rows.size() + 1);
}

TEST(ReportJson, ValidatesAndRoundTripsConfig) {
    auto c = small_config("S0");
    c.master_seed = 5;
    const auto report = run_sweep(make_panel(250, 2, 14), c);
    const auto doc = report_to_json(report);
    EXPECT_TRUE(validate_report_json(doc).empty());
    const auto back = backtest_config_from_json(doc.at("config"));
    EXPECT_EQ(back.master_seed, 5u);
    EXPECT_EQ(back.m_values, c.m_values);
    EXPECT_EQ(back.n_values, c.n_values);
    EXPECT_EQ(back.models, c.models);
    EXPECT_EQ(back.train.epochs, 5);
    auto broken = doc;
    broken.erase("cells");
    EXPECT_FALSE(validate_report_json(broken).empty());
    EXPECT_FALSE(validate_report_json(nlohmann::json::array()).empty());
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(100.0), "100");
    EXPECT_EQ(format_number(std::nan("")), "NaN");
    EXPECT_EQ(std::stod(format_number(0.030284942974857204)), 0.030284942974857204);
}
