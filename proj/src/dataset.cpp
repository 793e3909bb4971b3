#include "voi/dataset.hpp"

#include "voi/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <tuple>

namespace voi {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

struct Row {
    Date date;
    double close;
    std::size_t line;
};

// Blank lines and '#' comment lines (config echoes) carry no rows.
bool is_skippable(std::string_view line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_number(text.substr(0, 4), y) ||
        !parse_number(text.substr(5, 2), mo) || !parse_number(text.substr(8, 2), d)) {
        throw DataError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
    if (!date.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
    return date;
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                  static_cast<unsigned>(d.day()));
    return buf;
}

std::vector<PriceSeries> parse_prices(std::istream& in, std::string_view source_name) {
    const std::string src(source_name);
    std::string line;
    std::size_t line_no = 0;

    bool found_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (!is_skippable(line)) {
            found_header = true;
            break;
        }
    }
    if (!found_header) throw DataError(src + ": empty price file");
    {
        auto header = split_commas(line);
        if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].remove_prefix(3);
        if (header.size() != 3 || header[0] != "date" || header[1] != "symbol" || header[2] != "close") {
            throw DataError(src + ":" + std::to_string(line_no) + ": expected header 'date,symbol,close'");
        }
    }

    std::map<std::string, std::vector<Row>, std::less<>> by_symbol;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_skippable(line)) continue;
        const auto fields = split_commas(line);
        const std::string where = src + ":" + std::to_string(line_no);
        if (fields.size() != 3) throw DataError(where + ": expected 3 fields, got " + std::to_string(fields.size()));
        if (fields[1].empty()) throw DataError(where + ": empty symbol");
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        double close = 0.0;
        if (!parse_number(fields[2], close) || !std::isfinite(close)) {
            throw DataError(where + ": malformed close '" + std::string(fields[2]) + "'");
        }
        if (!(close > 0.0)) throw DataError(where + ": close must be positive, got " + std::string(fields[2]));
        by_symbol[std::string(fields[1])].push_back(Row{date, close, line_no});
    }

    std::vector<PriceSeries> out;
    out.reserve(by_symbol.size());
    for (auto& [symbol, rows] : by_symbol) {
        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return std::tie(a.date, a.line) < std::tie(b.date, b.line);
        });
        PriceSeries s;
        s.symbol = symbol;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0 && rows[i].date == rows[i - 1].date) {
                throw DataError(src + ":" + std::to_string(rows[i].line) + ": duplicate row for (" +
                                format_date(rows[i].date) + ", " + symbol + "), first seen on line " +
                                std::to_string(rows[i - 1].line));
            }
            s.dates.push_back(rows[i].date);
            s.close.push_back(rows[i].close);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PriceSeries> load_prices(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open price file " + csv_path.string());
    return parse_prices(in, csv_path.string());
}

ReturnSeries log_returns(const PriceSeries& prices) {
    if (prices.close.size() != prices.dates.size()) {
        throw DataError("log_returns: " + prices.symbol + " has mismatched dates and prices");
    }
    if (prices.close.size() < 2) throw DataError("log_returns: " + prices.symbol + " needs at least 2 prices");
    ReturnSeries out;
    out.dates.assign(prices.dates.begin() + 1, prices.dates.end());
    out.values.reserve(prices.close.size() - 1);
    for (std::size_t i = 0; i + 1 < prices.close.size(); ++i) {
        out.values.push_back(std::log(prices.close[i + 1] / prices.close[i]));
    }
    return out;
}

ReturnsPanel align_panel(const std::vector<PriceSeries>& series, const std::vector<std::string>& symbols) {
    if (symbols.empty()) throw DataError("align_panel: no symbols requested");
    std::vector<ReturnSeries> rets;
    rets.reserve(symbols.size());
    for (const auto& sym : symbols) {
        const auto it = std::find_if(series.begin(), series.end(), [&](const PriceSeries& s) { return s.symbol == sym; });
        if (it == series.end()) throw DataError("align_panel: unknown symbol '" + sym + "'");
        rets.push_back(log_returns(*it));
    }

    std::vector<Date> common = rets.front().dates;
    for (std::size_t j = 1; j < rets.size(); ++j) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), rets[j].dates.begin(), rets[j].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    if (common.empty()) throw DataError("align_panel: requested symbols share no return dates");

    ReturnsPanel panel;
    panel.symbols = symbols;
    panel.dates = common;
    panel.returns.resize(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(symbols.size()));
    for (std::size_t j = 0; j < rets.size(); ++j) {
        std::size_t src = 0;
        for (std::size_t i = 0; i < common.size(); ++i) {
            while (rets[j].dates[src] != common[i]) ++src;
            panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rets[j].values[src];
        }
    }
    return panel;
}

LagDataset lag_embed(const ReturnsPanel& panel, std::string_view target_symbol, std::size_t n_lags) {
    if (n_lags < 1) throw DomainError("lag_embed: n_lags must be >= 1");
    const auto it = std::find(panel.symbols.begin(), panel.symbols.end(), target_symbol);
    if (it == panel.symbols.end()) throw DataError("lag_embed: unknown target '" + std::string(target_symbol) + "'");
    const auto target_col = static_cast<Eigen::Index>(it - panel.symbols.begin());
    const std::size_t t_rows = panel.dates.size();
    if (t_rows < n_lags + 1) {
        throw DataError("lag_embed: panel of " + std::to_string(t_rows) + " rows too short for " +
                        std::to_string(n_lags) + " lags");
    }

    const std::size_t m = panel.symbols.size();
    const std::size_t rows = t_rows - n_lags;
    LagDataset ds;
    ds.m = m;
    ds.n = n_lags;
    ds.target_symbol = std::string(target_symbol);
    ds.symbols = panel.symbols;
    ds.predictors.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(m * n_lags));
    ds.response.resize(static_cast<Eigen::Index>(rows));
    ds.row_dates.reserve(rows);
    ds.latest_predictor_dates.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + n_lags - 1;  // latest predictor time
        const auto r = static_cast<Eigen::Index>(i);
        ds.response(r) = panel.returns(static_cast<Eigen::Index>(t + 1), target_col);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t l = 0; l < n_lags; ++l) {
                ds.predictors(r, static_cast<Eigen::Index>(j * n_lags + l)) =
                    panel.returns(static_cast<Eigen::Index>(t - l), static_cast<Eigen::Index>(j));
            }
        }
        ds.row_dates.push_back(panel.dates[t + 1]);
        ds.latest_predictor_dates.push_back(panel.dates[t]);
    }
    return ds;
}

std::vector<RollingSplit> rolling_splits(std::size_t n_rows, const WindowConfig& window) {
    if (window.train_len < 1 || window.test_len < 1 || window.step < 1) {
        throw DomainError("rolling_splits: window lengths and step must be >= 1");
    }
    if (n_rows < window.train_len + window.test_len) {
        throw DataError("rolling_splits: " + std::to_string(n_rows) + " rows cannot hold a " +
                        std::to_string(window.train_len) + "/" + std::to_string(window.test_len) + " split");
    }
    std::vector<RollingSplit> out;
    for (std::size_t off = 0; off + window.train_len + window.test_len <= n_rows; off += window.step) {
        const std::size_t mid = off + window.train_len;
        out.push_back(RollingSplit{{off, mid}, {mid, mid + window.test_len}});
    }
    return out;
}

Eigen::MatrixXd slice_rows(const Eigen::MatrixXd& m, RowRange range) {
    return m.middleRows(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()));
}

Eigen::VectorXd slice_rows(const Eigen::VectorXd& v, RowRange range) {
    return v.segment(static_cast<Eigen::Index>(range.begin), static_cast<Eigen::Index>(range.size()));
}

}  // namespace voi
