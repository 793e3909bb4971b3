#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace voi {

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD. Throws DataError on anything else.
[[nodiscard]] Date parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

struct PriceSeries {
    std::string symbol;
    std::vector<Date> dates;   // strictly increasing
    std::vector<double> close; // positive, finite
};

struct ReturnSeries {
    std::vector<Date> dates;   // date of the later price in each pair
    std::vector<double> values;
};

struct ReturnsPanel {
    std::vector<std::string> symbols;
    std::vector<Date> dates;
    Eigen::MatrixXd returns;  // dates.size() x symbols.size()
};

struct LagDataset {
    Eigen::MatrixXd predictors;  // N x (m * n); column j * n + l holds symbol j at lag l
    Eigen::VectorXd response;    // target return one step after the latest predictor
    std::size_t m = 0;
    std::size_t n = 0;
    std::string target_symbol;
    std::vector<std::string> symbols;
    std::vector<Date> row_dates;               // date of each response
    std::vector<Date> latest_predictor_dates;  // date of lag-0 predictors in each row

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(response.size()); }
};

/// Half-open row range [begin, end).
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const { return end - begin; }
    friend bool operator==(const RowRange&, const RowRange&) = default;
};

struct RollingSplit {
    RowRange train;
    RowRange test;
    friend bool operator==(const RollingSplit&, const RollingSplit&) = default;
};

struct WindowConfig {
    std::size_t train_len = 100;
    std::size_t test_len = 25;
    std::size_t step = 25;
};

/// CSV with header `date,symbol,close`. Series come back sorted by symbol
/// name, each sorted by date.
[[nodiscard]] std::vector<PriceSeries> load_prices(const std::filesystem::path& csv_path);
[[nodiscard]] std::vector<PriceSeries> parse_prices(std::istream& in, std::string_view source_name = "<stream>");

/// r(t+1) = ln(s(t+1) / s(t)).
[[nodiscard]] ReturnSeries log_returns(const PriceSeries& prices);

/// Returns per symbol restricted to the dates common to all requested
/// symbols; columns follow `symbols` order.
[[nodiscard]] ReturnsPanel align_panel(const std::vector<PriceSeries>& series, const std::vector<std::string>& symbols);

/// Predictor row for response r_target(t+1) is, per panel symbol,
/// (r(t), r(t-1), ..., r(t-n+1)). Yields panel.rows - n_lags rows.
[[nodiscard]] LagDataset lag_embed(const ReturnsPanel& panel, std::string_view target_symbol, std::size_t n_lags);

/// Train/test windows at offsets 0, step, 2*step, ... while both fit.
[[nodiscard]] std::vector<RollingSplit> rolling_splits(std::size_t n_rows, const WindowConfig& window = {});

/// Rows [range.begin, range.end) of a dataset.
[[nodiscard]] Eigen::MatrixXd slice_rows(const Eigen::MatrixXd& m, RowRange range);
[[nodiscard]] Eigen::VectorXd slice_rows(const Eigen::VectorXd& v, RowRange range);

}  // namespace voi
