#include "voi/backtest.hpp"

#include "voi/core.hpp"
#include "voi/errors.hpp"
#include "voi/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace voi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sign(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

double sample_sd(const Eigen::VectorXd& v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt((v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1));
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

void check_pair(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual, Eigen::Index min_len, const char* who) {
    if (predicted.size() != actual.size()) throw DataError(std::string(who) + ": length mismatch");
    if (predicted.size() < min_len) {
        throw DataError(std::string(who) + ": need at least " + std::to_string(min_len) + " values");
    }
}

}  // namespace

double mrr(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    check_pair(predicted, actual, 1, "mrr");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < actual.size(); ++i) {
        sum += sign(predicted(i)) * sign(actual(i)) * std::abs(actual(i));
    }
    return std::expm1(sum / static_cast<double>(actual.size()));
}

std::optional<double> correlation(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    check_pair(predicted, actual, 2, "correlation");
    const Eigen::ArrayXd a = predicted.array() - predicted.mean();
    const Eigen::ArrayXd b = actual.array() - actual.mean();
    const double saa = a.square().sum();
    const double sbb = b.square().sum();
    if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
    const double r = (a * b).sum() / std::sqrt(saa * sbb);
    return std::clamp(r, -1.0, 1.0);
}

std::uint64_t split_seed(std::uint64_t master, std::size_t m, std::size_t n, ModelKind model, std::size_t split_index) {
    return master ^ derive_seed(static_cast<std::uint64_t>(m), n, static_cast<std::uint64_t>(model), split_index);
}

SplitMetrics metrics_from_predictions(const LagDataset& ds, const RollingSplit& split,
                                      const Eigen::VectorXd& train_fitted, const Eigen::VectorXd& test_predicted,
                                      double shrinkage) {
    if (split.test.end > ds.rows() || split.train.end > split.test.begin) {
        throw DataError("split outside dataset bounds");
    }
    const Eigen::VectorXd y_train = slice_rows(ds.response, split.train);
    const Eigen::VectorXd y_test = slice_rows(ds.response, split.test);

    SplitMetrics out;
    out.sigma_train = sample_sd(y_train);
    out.sigma_test = sample_sd(y_test);
    out.mean_abs_test = y_test.cwiseAbs().mean();
    if (!(out.sigma_train > 0.0) || !(out.sigma_test > 0.0)) {
        out.degenerate = true;
        out.rmse_train = out.rmse_test = out.mrr_test = kNaN;
        out.mi_train_nats = out.mi_test_nats = kNaN;
        return out;
    }
    if (train_fitted.size() != y_train.size() || test_predicted.size() != y_test.size()) {
        throw DataError("prediction lengths do not match the split");
    }

    out.rmse_train = rmse(train_fitted, y_train);
    out.rmse_test = rmse(test_predicted, y_test);
    out.corr_test = correlation(test_predicted, y_test);
    out.mrr_test = mrr(test_predicted, y_test);
    const Eigen::MatrixXd x_train = slice_rows(ds.predictors, split.train);
    const Eigen::MatrixXd x_test = slice_rows(ds.predictors, split.test);
    out.mi_train_nats = gaussian_mi(x_train, y_train, shrinkage).nats;
    out.mi_test_nats = gaussian_mi(x_test, y_test, shrinkage).nats;
    return out;
}

SplitEvaluation evaluate_split(const LagDataset& ds, const RollingSplit& split, ModelKind model,
                               const TrainConfig& train, int pls_components, double shrinkage) {
    if (split.test.end > ds.rows() || split.train.end > split.test.begin || split.train.size() < 2) {
        throw DataError("evaluate_split: split outside dataset bounds");
    }
    const Eigen::MatrixXd x_train = slice_rows(ds.predictors, split.train);
    const Eigen::VectorXd y_train = slice_rows(ds.response, split.train);
    const Eigen::MatrixXd x_test = slice_rows(ds.predictors, split.test);

    SplitEvaluation ev;
    if (!(sample_sd(y_train) > 0.0) || !(sample_sd(slice_rows(ds.response, split.test)) > 0.0)) {
        ev.metrics = metrics_from_predictions(ds, split, ev.train_fitted, ev.test_predicted, shrinkage);
        return ev;
    }

    bool rank_deficient = false;
    int components = 0;
    switch (model) {
        case ModelKind::LM: {
            const LinearModel lm = ols_fit(x_train, y_train);
            rank_deficient = lm.rank_deficient;
            ev.train_fitted = predict(lm, x_train);
            ev.test_predicted = predict(lm, x_test);
            break;
        }
        case ModelKind::PLS: {
            const auto cap = std::min<Eigen::Index>(x_train.cols(), x_train.rows() - 1);
            const int c = static_cast<int>(std::min<Eigen::Index>(pls_components, cap));
            const PlsFit fit = simpls_fit(x_train, y_train, c);
            components = fit.model.n_components;
            ev.train_fitted = predict(fit.model, x_train);
            ev.test_predicted = predict(fit.model, x_test);
            break;
        }
        case ModelKind::NN: {
            const NnFit fit = nn_fit(x_train, y_train, train);
            ev.train_fitted = predict(fit.net, x_train);
            ev.test_predicted = predict(fit.net, x_test);
            break;
        }
    }
    ev.metrics = metrics_from_predictions(ds, split, ev.train_fitted, ev.test_predicted, shrinkage);
    ev.metrics.rank_deficient = rank_deficient;
    ev.metrics.pls_components = components;
    return ev;
}

namespace {

CellAverages average(const std::vector<SplitMetrics>& splits) {
    CellAverages a;
    double sig_tr2 = 0.0;
    double sig_te2 = 0.0;
    for (const auto& s : splits) {
        if (s.degenerate) continue;
        ++a.used_splits;
        a.rmse_train += s.rmse_train;
        a.rmse_test += s.rmse_test;
        a.mrr_test += s.mrr_test;
        a.mi_train_nats += s.mi_train_nats;
        a.mi_test_nats += s.mi_test_nats;
        sig_tr2 += s.sigma_train * s.sigma_train;
        sig_te2 += s.sigma_test * s.sigma_test;
        if (s.corr_test) {
            a.corr_test += *s.corr_test;
            ++a.corr_count;
        }
    }
    if (a.used_splits == 0) {
        a.rmse_train = a.rmse_test = a.mrr_test = a.mi_train_nats = a.mi_test_nats = kNaN;
        a.sigma_train = a.sigma_test = a.corr_test = kNaN;
        return a;
    }
    const auto k = static_cast<double>(a.used_splits);
    a.rmse_train /= k;
    a.rmse_test /= k;
    a.mrr_test /= k;
    a.mi_train_nats /= k;
    a.mi_test_nats /= k;
    a.sigma_train = std::sqrt(sig_tr2 / k);
    a.sigma_test = std::sqrt(sig_te2 / k);
    a.corr_test = a.corr_count > 0 ? a.corr_test / static_cast<double>(a.corr_count) : kNaN;
    return a;
}

struct CellTask {
    std::size_t m;
    std::size_t n;
    ModelKind model;
    const LagDataset* dataset;
    const std::vector<RollingSplit>* splits;
};

SweepCell run_cell(const CellTask& task, const BacktestConfig& config) {
    SweepCell cell;
    cell.m = task.m;
    cell.n = task.n;
    cell.model = task.model;
    cell.splits.reserve(task.splits->size());
    for (std::size_t s = 0; s < task.splits->size(); ++s) {
        TrainConfig train = config.train;
        train.seed = split_seed(config.master_seed, task.m, task.n, task.model, s);
        cell.splits.push_back(
            evaluate_split(*task.dataset, (*task.splits)[s], task.model, train, config.pls_components, config.shrinkage)
                .metrics);
    }
    cell.averages = average(cell.splits);
    if (cell.averages.used_splits > 0) {
        cell.frontier_rmse_train_sigma = rmse_frontier_gaussian(cell.averages.sigma_train, cell.averages.mi_train_nats);
        cell.frontier_rmse_test_sigma = rmse_frontier_gaussian(cell.averages.sigma_test, cell.averages.mi_train_nats);
    } else {
        cell.frontier_rmse_train_sigma = cell.frontier_rmse_test_sigma = kNaN;
    }
    return cell;
}

}  // namespace

BacktestReport run_sweep(const ReturnsPanel& panel, const BacktestConfig& config) {
    if (config.m_values.empty() || config.n_values.empty() || config.models.empty()) {
        throw ConfigError("run_sweep: m, n and model lists must be nonempty");
    }
    for (const auto m : config.m_values) {
        if (m < 1 || m > panel.symbols.size()) {
            throw ConfigError("run_sweep: m = " + std::to_string(m) + " outside [1, " +
                              std::to_string(panel.symbols.size()) + "]");
        }
        const auto first = panel.symbols.begin();
        if (std::find(first, first + static_cast<std::ptrdiff_t>(m), config.target) == first + static_cast<std::ptrdiff_t>(m)) {
            throw ConfigError("run_sweep: target '" + config.target + "' is not among the first " + std::to_string(m) +
                              " symbols");
        }
    }
    for (const auto n : config.n_values) {
        if (n < 1) throw ConfigError("run_sweep: n must be >= 1");
    }

    // Datasets and splits per (m, n); shared read-only by the model tasks.
    struct Prepared {
        std::size_t m;
        std::size_t n;
        LagDataset dataset;
        std::vector<RollingSplit> splits;
    };
    std::vector<Prepared> prepared;
    for (const auto m : config.m_values) {
        ReturnsPanel sub;
        sub.symbols.assign(panel.symbols.begin(), panel.symbols.begin() + static_cast<std::ptrdiff_t>(m));
        sub.dates = panel.dates;
        sub.returns = panel.returns.leftCols(static_cast<Eigen::Index>(m));
        for (const auto n : config.n_values) {
            Prepared p{m, n, {}, {}};
            try {
                p.dataset = lag_embed(sub, config.target, n);
                p.splits = rolling_splits(p.dataset.rows(), config.window);
            } catch (const DataError& e) {
                throw DataError("insufficient data for (m = " + std::to_string(m) + ", n = " + std::to_string(n) +
                                "): " + e.what());
            }
            prepared.push_back(std::move(p));
        }
    }

    std::vector<CellTask> tasks;
    for (const auto model : config.models) {
        for (const auto& p : prepared) tasks.push_back(CellTask{p.m, p.n, model, &p.dataset, &p.splits});
    }
    std::sort(tasks.begin(), tasks.end(), [](const CellTask& a, const CellTask& b) {
        return std::tie(a.model, a.m, a.n) < std::tie(b.model, b.m, b.n);
    });

    BacktestReport report;
    report.config = config;
    report.symbols = panel.symbols;
    report.cells.resize(tasks.size());

    const unsigned workers = std::max(1U, std::min<unsigned>(config.threads, static_cast<unsigned>(tasks.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) report.cells[i] = run_cell(tasks[i], config);
        return report;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < tasks.size(); i = next++) {
                    try {
                        report.cells[i] = run_cell(tasks[i], config);
                    } catch (...) {
                        const std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = tasks.size();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

std::vector<OverlayRow> frontier_overlay(const BacktestReport& report) {
    std::vector<OverlayRow> rows;
    rows.reserve(report.cells.size());
    for (const auto& cell : report.cells) {
        OverlayRow r;
        r.m = cell.m;
        r.n = cell.n;
        r.model = cell.model;
        r.mi_nats = cell.averages.mi_train_nats;
        r.mi_bits = nats_to_bits(r.mi_nats);
        r.avg_rmse_test = cell.averages.rmse_test;
        if (cell.averages.used_splits > 0) {
            r.frontier_rmse_train_sigma = rmse_frontier_gaussian(cell.averages.sigma_train, r.mi_nats);
            r.frontier_rmse_test_sigma = rmse_frontier_gaussian(cell.averages.sigma_test, r.mi_nats);
        } else {
            r.frontier_rmse_train_sigma = r.frontier_rmse_test_sigma = kNaN;
        }
        if (cell.averages.corr_count > 0) r.avg_corr = cell.averages.corr_test;
        r.avg_mrr = cell.averages.mrr_test;
        rows.push_back(r);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const OverlayRow& a, const OverlayRow& b) {
        return std::tie(a.model, a.m, a.n) < std::tie(b.model, b.m, b.n);
    });
    return rows;
}

}  // namespace voi
