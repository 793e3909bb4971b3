#include "voi/commands.hpp"

#include "voi/core.hpp"
#include "voi/errors.hpp"
#include "voi/info.hpp"
#include "voi/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace voi {

namespace {

using nlohmann::json;

const std::vector<std::string> kListingOrder{"BTC/USD", "ETH/USD", "DAI/BTC", "XRP/BTC", "IOT/BTC"};

std::string config_comment(const std::string& command, const json& config) {
    return "# voi " + command + " config: " + config.dump() + "\n";
}

const PriceSeries& find_series(const std::vector<PriceSeries>& series, const std::string& symbol) {
    const auto it = std::find_if(series.begin(), series.end(), [&](const PriceSeries& s) { return s.symbol == symbol; });
    if (it == series.end()) throw DataError("symbol '" + symbol + "' not found in price data");
    return *it;
}

std::vector<std::string> resolve_order(const std::vector<PriceSeries>& series, const std::string& target,
                                       const std::vector<std::string>& requested) {
    if (requested.empty()) return default_symbol_order(series, target);
    for (const auto& s : requested) find_series(series, s);
    return requested;
}

void check_shrinkage(double shrinkage) {
    if (!(shrinkage >= 0.0 && shrinkage < 1.0)) throw ConfigError("shrinkage must lie in [0, 1)");
}

void check_window(const WindowConfig& w) {
    if (w.train_len < 2 || w.test_len < 2 || w.step < 1) {
        throw ConfigError("window lengths must be >= 2 and step >= 1");
    }
}

ReturnsPanel panel_for(const std::vector<PriceSeries>& series, const std::vector<std::string>& order, std::size_t max_m) {
    if (max_m > order.size()) {
        throw ConfigError("m = " + std::to_string(max_m) + " exceeds the " + std::to_string(order.size()) +
                          " available symbols");
    }
    return align_panel(series, std::vector<std::string>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(max_m)));
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string to_string(InfoUnit unit) { return unit == InfoUnit::Nats ? "nats" : "bits"; }

InfoUnit info_unit_from_string(const std::string& name) {
    if (name == "nats") return InfoUnit::Nats;
    if (name == "bits") return InfoUnit::Bits;
    throw ConfigError("unknown unit '" + name + "' (expected nats or bits)");
}

double to_unit(double nats, InfoUnit unit) { return unit == InfoUnit::Nats ? nats : nats_to_bits(nats); }

std::vector<std::size_t> parse_index_list(const std::string& text) {
    std::set<std::size_t> values;
    auto parse = [&](std::string_view s) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw ConfigError("invalid integer list '" + text + "'");
        }
        return v;
    };
    std::string_view rest(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            values.insert(parse(item));
        } else {
            const std::size_t lo = parse(item.substr(0, dash));
            const std::size_t hi = parse(item.substr(dash + 1));
            if (hi < lo) throw ConfigError("invalid range '" + std::string(item) + "'");
            for (std::size_t v = lo; v <= hi; ++v) values.insert(v);
        }
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (values.empty()) throw ConfigError("empty integer list");
    return {values.begin(), values.end()};
}

std::vector<std::string> default_symbol_order(const std::vector<PriceSeries>& series, const std::string& target) {
    find_series(series, target);
    std::vector<std::string> rest;
    for (const auto& s : series) {
        if (s.symbol != target) rest.push_back(s.symbol);
    }
    auto rank = [](const std::string& s) {
        const auto it = std::find(kListingOrder.begin(), kListingOrder.end(), s);
        return static_cast<std::size_t>(it - kListingOrder.begin());
    };
    std::sort(rest.begin(), rest.end(), [&](const std::string& a, const std::string& b) {
        return std::pair(rank(a), a) < std::pair(rank(b), b);
    });
    rest.insert(rest.begin(), target);
    return rest;
}

json to_json(const RunConfig& c) {
    json j = to_json(c.backtest);
    j["input"] = c.input;
    j["symbols"] = c.symbols;
    j["output_dir"] = c.output_dir;
    j["units"] = to_string(c.units);
    return j;
}

RunConfig run_config_from_json(const json& doc, RunConfig c) {
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
    try {
        c.input = doc.value("input", c.input);
        if (doc.contains("symbols")) c.symbols = doc.at("symbols").get<std::vector<std::string>>();
        c.output_dir = doc.value("output_dir", c.output_dir);
        if (doc.contains("units")) c.units = info_unit_from_string(doc.at("units").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    c.backtest = backtest_config_from_json(doc, c.backtest);
    return c;
}

void validate(const RunConfig& c) {
    const auto& b = c.backtest;
    if (c.input.empty()) throw ConfigError("no input CSV given");
    if (b.target.empty()) throw ConfigError("no target symbol given");
    if (b.m_values.empty() || b.n_values.empty() || b.models.empty()) throw ConfigError("m, n and model lists must be nonempty");
    if (*std::min_element(b.m_values.begin(), b.m_values.end()) < 1) throw ConfigError("m values must be >= 1");
    if (*std::min_element(b.n_values.begin(), b.n_values.end()) < 1) throw ConfigError("n values must be >= 1");
    check_window(b.window);
    check_shrinkage(b.shrinkage);
    if (b.pls_components < 1) throw ConfigError("pls_components must be >= 1");
    if (b.train.epochs < 1 || b.train.hidden_units < 1 || b.train.batch_size < 1 || !(b.train.learning_rate > 0.0)) {
        throw ConfigError("NN training parameters must be positive");
    }
    if (b.train.batch_size > b.window.train_len) throw ConfigError("batch_size exceeds the training window");
    if (b.threads < 1) throw ConfigError("threads must be >= 1");
    if (!c.symbols.empty()) {
        const std::set<std::string> unique(c.symbols.begin(), c.symbols.end());
        if (unique.size() != c.symbols.size()) throw ConfigError("symbol order lists a symbol twice");
        if (c.symbols.front() != b.target) throw ConfigError("symbol order must start with the target symbol");
        if (*std::max_element(b.m_values.begin(), b.m_values.end()) > c.symbols.size()) {
            throw ConfigError("m exceeds the number of symbols in the configured order");
        }
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw DataError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string frontier_csv(const FrontierOptions& o) {
    if (o.sigma.has_value() == o.entropy_nats.has_value()) {
        throw ConfigError("frontier: give exactly one of sigma or entropy");
    }
    if (o.sigma && !(*o.sigma > 0.0 && std::isfinite(*o.sigma))) throw ConfigError("frontier: sigma must be positive");
    if (o.entropy_nats && !std::isfinite(*o.entropy_nats)) throw ConfigError("frontier: entropy must be finite");
    if (!(o.grid_start >= 0.0) || !(o.grid_step > 0.0) || !(o.grid_stop >= o.grid_start) || !std::isfinite(o.grid_stop)) {
        throw ConfigError("frontier: grid needs 0 <= start <= stop and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((o.grid_stop - o.grid_start) / o.grid_step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t i = 0; i < count; ++i) grid[i] = o.grid_start + static_cast<double>(i) * o.grid_step;

    const FrontierSource source = o.sigma ? FrontierSource{SigmaSource{*o.sigma}} : FrontierSource{EntropyNats{*o.entropy_nats}};
    const FrontierCurve curve = frontier_curve(source, grid);

    json cfg{{"grid_start_nats", o.grid_start}, {"grid_stop_nats", o.grid_stop}, {"grid_step_nats", o.grid_step},
             {"units", to_string(o.units)}};
    if (o.sigma) cfg["sigma"] = *o.sigma;
    if (o.entropy_nats) cfg["entropy_nats"] = *o.entropy_nats;

    std::ostringstream out;
    out << config_comment("frontier", cfg) << "info,u,v,rmse\n";
    for (const auto& p : curve.points) {
        out << format_number(to_unit(p.info_nats, o.units)) << ',' << format_number(p.u_value) << ','
            << format_number(p.v_value) << ',' << format_number(p.rmse) << '\n';
    }
    return out.str();
}

json mi_summary(const MiOptions& o) {
    if (o.input.empty() || o.target.empty()) throw ConfigError("mi: input and target are required");
    if (o.m_values.empty() || o.n_values.empty()) throw ConfigError("mi: m and n lists must be nonempty");
    if (o.m_values.front() < 1 || o.n_values.front() < 1) throw ConfigError("mi: m and n must be >= 1");
    check_shrinkage(o.shrinkage);
    check_window(o.window);

    const auto series = load_prices(o.input);
    const auto order = resolve_order(series, o.target, o.symbols);
    if (order.front() != o.target) throw ConfigError("mi: symbol order must start with the target symbol");
    const std::size_t max_m = *std::max_element(o.m_values.begin(), o.m_values.end());
    const ReturnsPanel full_panel = panel_for(series, order, max_m);

    json results = json::array();
    for (const auto m : o.m_values) {
        ReturnsPanel panel;
        panel.symbols.assign(full_panel.symbols.begin(), full_panel.symbols.begin() + static_cast<std::ptrdiff_t>(m));
        panel.dates = full_panel.dates;
        panel.returns = full_panel.returns.leftCols(static_cast<Eigen::Index>(m));
        for (const auto n : o.n_values) {
            const LagDataset ds = lag_embed(panel, o.target, n);
            const MIEstimate full = gaussian_mi(ds.predictors, ds.response, o.shrinkage);
            json windows = json::array();
            double sum_train = 0.0;
            double sum_test = 0.0;
            std::size_t count = 0;
            if (ds.rows() >= o.window.train_len + o.window.test_len) {
                const auto splits = rolling_splits(ds.rows(), o.window);
                for (std::size_t s = 0; s < splits.size(); ++s) {
                    const double tr = gaussian_mi(slice_rows(ds.predictors, splits[s].train),
                                                  slice_rows(ds.response, splits[s].train), o.shrinkage).nats;
                    const double te = gaussian_mi(slice_rows(ds.predictors, splits[s].test),
                                                  slice_rows(ds.response, splits[s].test), o.shrinkage).nats;
                    windows.push_back({{"index", s}, {"train_nats", tr}, {"test_nats", te}});
                    sum_train += tr;
                    sum_test += te;
                    ++count;
                }
            }
            // Averages are taken in nats and converted last.
            const double avg_train = count ? sum_train / static_cast<double>(count) : std::nan("");
            const double avg_test = count ? sum_test / static_cast<double>(count) : std::nan("");
            results.push_back({{"m", m},
                               {"n", n},
                               {"rows", ds.rows()},
                               {"full",
                                {{"nats", full.nats},
                                 {"bits", full.bits},
                                 {"shrinkage", full.shrinkage},
                                 {"predictor_dim", full.predictor_dim},
                                 {"n_samples", full.n_samples},
                                 {"low_sample_warning", full.low_sample_warning}}},
                               {"windows", windows},
                               {"avg_train_nats", nullable(avg_train)},
                               {"avg_train_bits", nullable(nats_to_bits(avg_train))},
                               {"avg_test_nats", nullable(avg_test)},
                               {"avg_test_bits", nullable(nats_to_bits(avg_test))}});
        }
    }

    json cfg{{"input", o.input},
             {"target", o.target},
             {"symbols", order},
             {"m_values", o.m_values},
             {"n_values", o.n_values},
             {"shrinkage", o.shrinkage},
             {"window", {{"train_len", o.window.train_len}, {"test_len", o.window.test_len}, {"step", o.window.step}}},
             {"units", to_string(o.units)}};
    return {{"schema", "voi.mi_summary"}, {"schema_version", 1}, {"config", cfg}, {"results", results}};
}

std::string acf_csv(const AcfOptions& o) {
    if (o.input.empty() || o.symbol.empty()) throw ConfigError("acf: input and symbol are required");
    if (o.max_lag < 1) throw ConfigError("acf: max_lag must be >= 1");
    const auto series = load_prices(o.input);
    const ReturnSeries r = log_returns(find_series(series, o.symbol));
    const AcfSeries a = acf(r.values, o.max_lag);

    std::ostringstream out;
    out << config_comment("acf", {{"input", o.input}, {"symbol", o.symbol}, {"max_lag", o.max_lag}}) << "lag,acf\n";
    for (std::size_t k = 0; k < a.values.size(); ++k) out << k << ',' << format_number(a.values[k]) << '\n';
    return out.str();
}

std::string hartley_csv(const HartleyOptions& o) {
    if (o.ks.empty()) throw ConfigError("hartley: k list is empty");
    if (o.n_samples < 2) throw ConfigError("hartley: need at least 2 samples");
    if (!(o.sigma > 0.0)) throw ConfigError("hartley: sigma must be positive");
    if (o.restarts < 1) throw ConfigError("hartley: restarts must be >= 1");
    for (const auto k : o.ks) {
        if (k < 1 || k > o.n_samples) throw ConfigError("hartley: k must lie in [1, n_samples]");
    }

    Rng rng(derive_seed(o.seed, 0));
    std::vector<double> sample(o.n_samples);
    for (auto& v : sample) v = o.sigma * rng.normal();
    const EntropyNats h = gaussian_entropy_from_sample(sample);

    std::ostringstream out;
    out << config_comment("hartley", {{"ks", o.ks},
                                      {"n_samples", o.n_samples},
                                      {"sigma", o.sigma},
                                      {"restarts", o.restarts},
                                      {"seed", o.seed},
                                      {"units", to_string(o.units)}})
        << "k,info,u_hartley,u_shannon,std_error\n";
    for (const auto k : o.ks) {
        const HartleyEstimate est = hartley_value_estimate(sample, k, o.restarts, o.seed);
        out << k << ',' << format_number(to_unit(est.info_nats, o.units)) << ',' << format_number(est.u_value) << ','
            << format_number(u_of_info(est.info_nats, h)) << ',' << format_number(est.std_error) << '\n';
    }
    return out.str();
}

std::string synth_csv(const SynthSpec& spec) {
    validate(spec);
    return config_comment("synth", to_json(spec)) + prices_to_csv(synthesize(spec));
}

BacktestOutputs run_backtest(const RunConfig& config) {
    validate(config);
    const auto series = load_prices(config.input);
    const auto order = resolve_order(series, config.backtest.target, config.symbols);
    if (order.front() != config.backtest.target) throw ConfigError("symbol order must start with the target symbol");
    const std::size_t max_m = *std::max_element(config.backtest.m_values.begin(), config.backtest.m_values.end());
    const ReturnsPanel panel = panel_for(series, order, max_m);

    const BacktestReport report = run_sweep(panel, config.backtest);
    BacktestOutputs out;
    out.report = report_to_json(report);
    out.report["run_config"] = to_json(config);
    out.overlay_csv = config_comment("backtest", to_json(config)) + overlay_to_csv(frontier_overlay(report));
    return out;
}

void write_backtest_outputs(const RunConfig& config, const BacktestOutputs& outputs) {
    const std::filesystem::path dir(config.output_dir);
    write_file_atomic(dir / "report.json", outputs.report.dump(2) + "\n");
    write_file_atomic(dir / "overlay.csv", outputs.overlay_csv);
}

}  // namespace voi
