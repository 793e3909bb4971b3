// voi: value-of-information frontier, MI estimation and forecast backtests.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include "voi/commands.hpp"
#include "voi/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// --out wins, then $VOI_OUTPUT_DIR/<default_name>, then ./<default_name>; "-" is stdout.
void emit(const std::string& out_flag, const std::string& default_name, const std::string& content) {
    if (out_flag == "-") {
        std::cout << content;
        return;
    }
    std::filesystem::path path = out_flag;
    if (path.empty()) {
        const char* env = std::getenv(voi::kOutputDirEnv);
        path = std::filesystem::path(env && *env ? env : ".") / default_name;
    }
    voi::write_file_atomic(path, content);
    std::cerr << "wrote " << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Value-of-information toolkit: RMSE(I) frontiers, Gaussian MI, forecast backtests"};
    app.require_subcommand(1);

    // frontier
    voi::FrontierOptions fr;
    std::string fr_units = "bits";
    std::string fr_out;
    double fr_sigma = 0.0;
    double fr_entropy = 0.0;
    auto* frontier = app.add_subcommand("frontier", "Tabulate U(I), V(I) and RMSE(I) on an information grid");
    auto* sigma_opt = frontier->add_option("--sigma", fr_sigma, "Response standard deviation");
    auto* entropy_opt = frontier->add_option("--entropy", fr_entropy, "Response differential entropy (nats)");
    sigma_opt->excludes(entropy_opt);
    frontier->add_option("--start", fr.grid_start, "Grid start (nats)")->capture_default_str();
    frontier->add_option("--stop", fr.grid_stop, "Grid stop (nats)")->capture_default_str();
    frontier->add_option("--step", fr.grid_step, "Grid step (nats)")->capture_default_str();
    frontier->add_option("--units", fr_units, "Unit of the info column: nats|bits")->capture_default_str();
    frontier->add_option("-o,--out", fr_out, "Output CSV ('-' for stdout)");

    // mi
    voi::MiOptions mi;
    std::string mi_symbols, mi_m = "1", mi_n = "2", mi_units = "bits", mi_out;
    auto* mi_cmd = app.add_subcommand("mi", "Gaussian mutual information between lagged predictors and the next return");
    mi_cmd->add_option("--input", mi.input, "Price CSV (date,symbol,close)")->required();
    mi_cmd->add_option("--target", mi.target, "Response symbol")->required();
    mi_cmd->add_option("--symbols", mi_symbols, "Comma-separated symbol order (target first)");
    mi_cmd->add_option("--m", mi_m, "Symbol counts, e.g. 1-5")->capture_default_str();
    mi_cmd->add_option("--n", mi_n, "Lag counts, e.g. 2-20")->capture_default_str();
    mi_cmd->add_option("--shrinkage", mi.shrinkage, "Covariance shrinkage in [0, 1)")->capture_default_str();
    mi_cmd->add_option("--train", mi.window.train_len, "Training window")->capture_default_str();
    mi_cmd->add_option("--test", mi.window.test_len, "Testing window")->capture_default_str();
    mi_cmd->add_option("--step", mi.window.step, "Window step")->capture_default_str();
    mi_cmd->add_option("--units", mi_units, "Display unit: nats|bits")->capture_default_str();
    mi_cmd->add_option("-o,--out", mi_out, "Output JSON ('-' for stdout)");

    // acf
    voi::AcfOptions ac;
    std::string ac_out;
    auto* acf_cmd = app.add_subcommand("acf", "Autocorrelation of a symbol's log-returns");
    acf_cmd->add_option("--input", ac.input, "Price CSV")->required();
    acf_cmd->add_option("--symbol", ac.symbol, "Symbol")->required();
    acf_cmd->add_option("--max-lag", ac.max_lag, "Largest lag")->capture_default_str();
    acf_cmd->add_option("-o,--out", ac_out, "Output CSV ('-' for stdout)");

    // hartley
    voi::HartleyOptions ha;
    std::string ha_k = "1,2,4,8", ha_units = "bits", ha_out;
    auto* hartley = app.add_subcommand("hartley", "k-means value of Hartley information vs the Shannon frontier");
    hartley->add_option("--k", ha_k, "Partition sizes, e.g. 1,2,4,8")->capture_default_str();
    hartley->add_option("--samples", ha.n_samples, "Gaussian sample size")->capture_default_str();
    hartley->add_option("--sigma", ha.sigma, "Sample standard deviation")->capture_default_str();
    hartley->add_option("--restarts", ha.restarts, "k-means restarts")->capture_default_str();
    hartley->add_option("--seed", ha.seed, "Seed")->capture_default_str();
    hartley->add_option("--units", ha_units, "Unit of the info column: nats|bits")->capture_default_str();
    hartley->add_option("-o,--out", ha_out, "Output CSV ('-' for stdout)");

    // synth
    voi::SynthSpec sy;
    std::string sy_kind = "ar1_panel", sy_out;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic price CSV");
    synth->add_option("--kind", sy_kind, "gaussian_channel|ar1_panel")->capture_default_str();
    synth->add_option("--symbols", sy.symbols, "Number of symbols (ar1_panel)")->capture_default_str();
    synth->add_option("--rho", sy.rho, "Channel correlation (gaussian_channel)")->capture_default_str();
    synth->add_option("--phi", sy.phi, "AR(1) coefficient (ar1_panel)")->capture_default_str();
    synth->add_option("--noise", sy.noise_scale, "Innovation standard deviation")->capture_default_str();
    synth->add_option("--length", sy.length, "Prices per symbol")->capture_default_str();
    synth->add_option("--seed", sy.seed, "Seed")->capture_default_str();
    synth->add_option("-o,--out", sy_out, "Output CSV ('-' for stdout)");

    // backtest
    std::string bt_config, bt_input, bt_target, bt_symbols, bt_m, bt_n, bt_models, bt_units, bt_outdir;
    std::size_t bt_train = 0, bt_test = 0, bt_step = 0, bt_batch = 0;
    int bt_epochs = 0, bt_hidden = 0, bt_pls = 0;
    double bt_lr = 0.0, bt_shrink = 0.0;
    std::uint64_t bt_seed = 0;
    unsigned bt_threads = 0;
    auto* backtest = app.add_subcommand("backtest", "Rolling-window (m, n, model) sweep joined with the RMSE(I) frontier");
    backtest->add_option("--config", bt_config, "JSON run config (flags override it)");
    auto* o_input = backtest->add_option("--input", bt_input, "Price CSV");
    auto* o_target = backtest->add_option("--target", bt_target, "Response symbol");
    auto* o_symbols = backtest->add_option("--symbols", bt_symbols, "Comma-separated symbol order (target first)");
    auto* o_m = backtest->add_option("--m", bt_m, "Symbol counts (default 1-5)");
    auto* o_n = backtest->add_option("--n", bt_n, "Lag counts (default 2-20)");
    auto* o_models = backtest->add_option("--models", bt_models, "Comma-separated subset of LM,PLS,NN");
    auto* o_train = backtest->add_option("--train", bt_train, "Training window (default 100)");
    auto* o_test = backtest->add_option("--test", bt_test, "Testing window (default 25)");
    auto* o_step = backtest->add_option("--step", bt_step, "Window step (default 25)");
    auto* o_epochs = backtest->add_option("--epochs", bt_epochs, "NN epochs (default 30)");
    auto* o_hidden = backtest->add_option("--hidden", bt_hidden, "NN hidden units (default 3)");
    auto* o_lr = backtest->add_option("--learning-rate", bt_lr, "NN learning rate (default 0.05)");
    auto* o_batch = backtest->add_option("--batch-size", bt_batch, "NN batch size (default 16)");
    auto* o_pls = backtest->add_option("--pls-components", bt_pls, "PLS components (default 3)");
    auto* o_shrink = backtest->add_option("--shrinkage", bt_shrink, "MI covariance shrinkage (default 0.01)");
    auto* o_seed = backtest->add_option("--seed", bt_seed, "Master seed (default 0)");
    auto* o_threads = backtest->add_option("--threads", bt_threads, "Worker threads (default 1)");
    auto* o_units = backtest->add_option("--units", bt_units, "Display unit: nats|bits");
    auto* o_outdir = backtest->add_option("--output-dir", bt_outdir, "Directory for report.json and overlay.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*frontier) {
            if (*sigma_opt) fr.sigma = fr_sigma;
            if (*entropy_opt) fr.entropy_nats = fr_entropy;
            fr.units = voi::info_unit_from_string(fr_units);
            emit(fr_out, "frontier.csv", voi::frontier_csv(fr));
        } else if (*mi_cmd) {
            mi.symbols = split_list(mi_symbols);
            mi.m_values = voi::parse_index_list(mi_m);
            mi.n_values = voi::parse_index_list(mi_n);
            mi.units = voi::info_unit_from_string(mi_units);
            emit(mi_out, "mi.json", voi::mi_summary(mi).dump(2) + "\n");
        } else if (*acf_cmd) {
            emit(ac_out, "acf.csv", voi::acf_csv(ac));
        } else if (*hartley) {
            ha.ks = voi::parse_index_list(ha_k);
            ha.units = voi::info_unit_from_string(ha_units);
            emit(ha_out, "hartley.csv", voi::hartley_csv(ha));
        } else if (*synth) {
            sy.kind = voi::synth_kind_from_string(sy_kind);
            emit(sy_out, "synth.csv", voi::synth_csv(sy));
        } else if (*backtest) {
            voi::RunConfig rc;
            if (!bt_config.empty()) {
                std::ifstream in(bt_config);
                if (!in) throw voi::ConfigError("cannot open config file " + bt_config);
                nlohmann::json doc;
                try {
                    doc = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw voi::ConfigError(std::string("config file: ") + e.what());
                }
                rc = voi::run_config_from_json(doc, rc);
            }
            if (const char* env = std::getenv(voi::kOutputDirEnv); env && *env) rc.output_dir = env;
            auto& b = rc.backtest;
            if (*o_input) rc.input = bt_input;
            if (*o_target) b.target = bt_target;
            if (*o_symbols) rc.symbols = split_list(bt_symbols);
            if (*o_m) b.m_values = voi::parse_index_list(bt_m);
            if (*o_n) b.n_values = voi::parse_index_list(bt_n);
            if (*o_models) {
                b.models.clear();
                for (const auto& name : split_list(bt_models)) b.models.push_back(voi::model_kind_from_string(name));
            }
            if (*o_train) b.window.train_len = bt_train;
            if (*o_test) b.window.test_len = bt_test;
            if (*o_step) b.window.step = bt_step;
            if (*o_epochs) b.train.epochs = bt_epochs;
            if (*o_hidden) b.train.hidden_units = bt_hidden;
            if (*o_lr) b.train.learning_rate = bt_lr;
            if (*o_batch) b.train.batch_size = bt_batch;
            if (*o_pls) b.pls_components = bt_pls;
            if (*o_shrink) b.shrinkage = bt_shrink;
            if (*o_seed) b.master_seed = bt_seed;
            if (*o_threads) b.threads = bt_threads;
            if (*o_units) rc.units = voi::info_unit_from_string(bt_units);
            if (*o_outdir) rc.output_dir = bt_outdir;

            const auto outputs = voi::run_backtest(rc);
            voi::write_backtest_outputs(rc, outputs);
            std::cerr << "wrote " << (std::filesystem::path(rc.output_dir) / "report.json").string() << " and overlay.csv\n";
        }
    } catch (const voi::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const voi::DomainError& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const voi::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const voi::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
