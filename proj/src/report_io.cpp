#include "voi/backtest.hpp"
#include "voi/errors.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace voi {

namespace {

using nlohmann::json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt(const std::optional<double>& v) { return v && std::isfinite(*v) ? json(*v) : json(nullptr); }

json split_to_json(const SplitMetrics& s) {
    return {{"rmse_train", num(s.rmse_train)},
            {"rmse_test", num(s.rmse_test)},
            {"corr_test", opt(s.corr_test)},
            {"mrr_test", num(s.mrr_test)},
            {"mi_train_nats", num(s.mi_train_nats)},
            {"mi_test_nats", num(s.mi_test_nats)},
            {"sigma_train", num(s.sigma_train)},
            {"sigma_test", num(s.sigma_test)},
            {"mean_abs_test", num(s.mean_abs_test)},
            {"degenerate", s.degenerate},
            {"rank_deficient", s.rank_deficient},
            {"pls_components", s.pls_components}};
}

json averages_to_json(const CellAverages& a) {
    return {{"rmse_train", num(a.rmse_train)},
            {"rmse_test", num(a.rmse_test)},
            {"corr_test", a.corr_count > 0 ? num(a.corr_test) : json(nullptr)},
            {"corr_count", a.corr_count},
            {"mrr_test", num(a.mrr_test)},
            {"mi_train_nats", num(a.mi_train_nats)},
            {"mi_train_bits", num(nats_to_bits(a.mi_train_nats))},
            {"mi_test_nats", num(a.mi_test_nats)},
            {"mi_test_bits", num(nats_to_bits(a.mi_test_nats))},
            {"sigma_train", num(a.sigma_train)},
            {"sigma_test", num(a.sigma_test)},
            {"used_splits", a.used_splits}};
}

template <typename T>
std::vector<T> get_list(const json& doc, const char* key, std::vector<T> fallback) {
    return doc.contains(key) ? doc.at(key).get<std::vector<T>>() : std::move(fallback);
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

nlohmann::json to_json(const BacktestConfig& c) {
    json models = json::array();
    for (const auto k : c.models) models.push_back(to_string(k));
    return {{"target", c.target},
            {"m_values", c.m_values},
            {"n_values", c.n_values},
            {"models", models},
            {"train", to_json(c.train)},
            {"pls_components", c.pls_components},
            {"window", {{"train_len", c.window.train_len}, {"test_len", c.window.test_len}, {"step", c.window.step}}},
            {"shrinkage", c.shrinkage},
            {"master_seed", c.master_seed},
            {"threads", c.threads}};
}

BacktestConfig backtest_config_from_json(const nlohmann::json& doc, BacktestConfig c) {
    try {
        c.target = doc.value("target", c.target);
        c.m_values = get_list(doc, "m_values", c.m_values);
        c.n_values = get_list(doc, "n_values", c.n_values);
        if (doc.contains("models")) {
            c.models.clear();
            for (const auto& name : doc.at("models")) c.models.push_back(model_kind_from_string(name.get<std::string>()));
        }
        if (doc.contains("train")) c.train = train_config_from_json(doc.at("train"), c.train);
        c.pls_components = doc.value("pls_components", c.pls_components);
        if (doc.contains("window")) {
            const auto& w = doc.at("window");
            c.window.train_len = w.value("train_len", c.window.train_len);
            c.window.test_len = w.value("test_len", c.window.test_len);
            c.window.step = w.value("step", c.window.step);
        }
        c.shrinkage = doc.value("shrinkage", c.shrinkage);
        c.master_seed = doc.value("master_seed", c.master_seed);
        c.threads = doc.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("backtest config: ") + e.what());
    }
    return c;
}

nlohmann::json report_to_json(const BacktestReport& report) {
    json cells = json::array();
    for (const auto& cell : report.cells) {
        json splits = json::array();
        for (const auto& s : cell.splits) splits.push_back(split_to_json(s));
        cells.push_back({{"m", cell.m},
                         {"n", cell.n},
                         {"model", to_string(cell.model)},
                         {"split_count", cell.splits.size()},
                         {"splits", splits},
                         {"averages", averages_to_json(cell.averages)},
                         {"frontier_rmse_train_sigma", num(cell.frontier_rmse_train_sigma)},
                         {"frontier_rmse_test_sigma", num(cell.frontier_rmse_test_sigma)}});
    }
    json frontier = json::array();
    for (const auto& row : frontier_overlay(report)) {
        frontier.push_back({{"m", row.m},
                            {"n", row.n},
                            {"model", to_string(row.model)},
                            {"info_nats", num(row.mi_nats)},
                            {"frontier_rmse_train_sigma", num(row.frontier_rmse_train_sigma)},
                            {"frontier_rmse_test_sigma", num(row.frontier_rmse_test_sigma)}});
    }
    return {{"schema", "voi.backtest_report"},
            {"schema_version", 1},
            {"config", to_json(report.config)},
            {"symbols", report.symbols},
            {"cells", cells},
            {"frontier", frontier}};
}

std::string overlay_to_csv(const std::vector<OverlayRow>& rows) {
    std::ostringstream out;
    out << "m,n,model,mi_nats,mi_bits,avg_rmse_test,frontier_rmse_train_sigma,frontier_rmse_test_sigma,avg_corr,avg_mrr\n";
    for (const auto& r : rows) {
        out << r.m << ',' << r.n << ',' << to_string(r.model) << ',' << format_number(r.mi_nats) << ','
            << format_number(r.mi_bits) << ',' << format_number(r.avg_rmse_test) << ','
            << format_number(r.frontier_rmse_train_sigma) << ',' << format_number(r.frontier_rmse_test_sigma) << ','
            << (r.avg_corr ? format_number(*r.avg_corr) : std::string("NaN")) << ',' << format_number(r.avg_mrr)
            << '\n';
    }
    return out.str();
}

std::vector<std::string> validate_report_json(const nlohmann::json& doc) {
    std::vector<std::string> problems;
    auto need = [&](const json& obj, const char* key, json::value_t type, const std::string& where) {
        if (!obj.is_object() || !obj.contains(key)) {
            problems.push_back(where + ": missing '" + key + "'");
            return false;
        }
        const auto actual = obj.at(key).type();
        const bool numeric_ok = type == json::value_t::number_float &&
                                (actual == json::value_t::number_integer || actual == json::value_t::number_unsigned ||
                                 actual == json::value_t::null);
        const bool unsigned_ok = type == json::value_t::number_unsigned && actual == json::value_t::number_integer &&
                                 obj.at(key).get<long long>() >= 0;
        if (actual != type && !numeric_ok && !unsigned_ok) {
            problems.push_back(where + ": '" + key + "' has type " + obj.at(key).type_name());
            return false;
        }
        return true;
    };
    using vt = json::value_t;
    if (!doc.is_object()) return {"report is not a JSON object"};
    if (need(doc, "schema", vt::string, "report") && doc.at("schema") != "voi.backtest_report") {
        problems.push_back("report: unexpected schema name");
    }
    need(doc, "schema_version", vt::number_unsigned, "report");
    if (need(doc, "config", vt::object, "report")) {
        const auto& c = doc.at("config");
        need(c, "target", vt::string, "config");
        need(c, "master_seed", vt::number_unsigned, "config");
        need(c, "m_values", vt::array, "config");
        need(c, "n_values", vt::array, "config");
        need(c, "models", vt::array, "config");
        need(c, "window", vt::object, "config");
    }
    need(doc, "symbols", vt::array, "report");
    if (need(doc, "cells", vt::array, "report")) {
        std::size_t i = 0;
        for (const auto& cell : doc.at("cells")) {
            const std::string where = "cells[" + std::to_string(i++) + "]";
            need(cell, "m", vt::number_unsigned, where);
            need(cell, "n", vt::number_unsigned, where);
            need(cell, "model", vt::string, where);
            need(cell, "frontier_rmse_train_sigma", vt::number_float, where);
            need(cell, "frontier_rmse_test_sigma", vt::number_float, where);
            if (need(cell, "averages", vt::object, where)) {
                for (const char* key : {"rmse_train", "rmse_test", "mrr_test", "mi_train_nats", "mi_test_nats",
                                        "sigma_train", "sigma_test"}) {
                    need(cell.at("averages"), key, vt::number_float, where + ".averages");
                }
            }
            if (need(cell, "splits", vt::array, where) && need(cell, "split_count", vt::number_unsigned, where) &&
                cell.at("splits").size() != cell.at("split_count").get<std::size_t>()) {
                problems.push_back(where + ": split_count disagrees with splits");
            }
        }
    }
    need(doc, "frontier", vt::array, "report");
    return problems;
}

}  // namespace voi
